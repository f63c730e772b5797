#include "iscc/stability.hpp"

#include <Eigen/Eigenvalues>

namespace iscc {

MatX kron(const MatX& a, const MatX& b) {
    MatX out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

StabilityMatrix build_stability_matrix(const Mat6& a, const Mat63& b, const Mat36& k,
                                       double eps) {
    if (eps < 0.0 || eps > 1.0) throw DomainError("build_stability_matrix: eps in [0,1]");
    StabilityMatrix sm;
    sm.eps_ctrl = eps;
    sm.closed_loop = a - b * k;
    sm.m = (1.0 - eps) * kron(sm.closed_loop, sm.closed_loop) + eps * kron(a, a);
    return sm;
}

double spectral_radius(const MatX& m) {
    if (m.rows() != m.cols()) throw DomainError("spectral_radius: square matrix required");
    Eigen::EigenSolver<MatX> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
        throw NonConvergenceError("spectral_radius: eigensolver failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double critical_eps(const Mat6& a, const Mat63& b, const Mat36& k, double tol) {
    auto rho = [&](double e) { return spectral_radius(build_stability_matrix(a, b, k, e).m); };
    if (rho(0.0) >= 1.0)
        throw InfeasibleError("critical_eps: loop unstable even without drops");
    // Scan for the first bracket where rho crosses 1, then bisect.
    double lo = 0.0, hi = -1.0;
    for (double e = 1e-3; e <= 1.0 + 1e-12; e = std::min(1.0, e * 2.0)) {
        if (rho(e) > 1.0) {
            hi = e;
            break;
        }
        lo = e;
        if (e >= 1.0) break;
    }
    if (hi < 0.0) {
        // Fall back to a fine linear scan; the doubling grid can step over a
        // narrow unstable band near the top of the interval.
        for (double e = lo; e <= 1.0 + 1e-12; e += 1e-2) {
            if (rho(e) > 1.0) {
                hi = e;
                break;
            }
            lo = e;
        }
    }
    if (hi < 0.0) throw InfeasibleError("critical_eps: no instability threshold in (0,1)");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (rho(mid) > 1.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

double bisect_alpha_for_eps(double eps_target, double avg_gamma, const WaveformConfig& wf,
                            const FblParams& fbl, double tol) {
    auto eps_of = [&](double a) { return ctrl_drop_probability(a, avg_gamma, wf, fbl); };
    double lo = 1e-6, hi = 1.0 - 1e-9;
    if (eps_of(hi) > eps_target)
        throw InfeasibleError("critical_alpha_ctrl: target drop rate unreachable in (0,1)");
    if (eps_of(lo) < eps_target) return lo;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (eps_of(mid) > eps_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double critical_alpha_ctrl(double eps_target, double avg_gamma, const WaveformConfig& wf,
                           const FblParams& fbl, double tol) {
    return bisect_alpha_for_eps(eps_target, avg_gamma, wf, fbl, tol);
}

double alpha_for_rho(double rho_max, const Mat6& a, const Mat63& b, const Mat36& k,
                     double avg_gamma, const WaveformConfig& wf, const FblParams& fbl,
                     double tol) {
    if (spectral_radius(build_stability_matrix(a, b, k, 0.0).m) > rho_max)
        throw InfeasibleError("alpha_for_rho: margin unreachable even with lossless control");
    // rho(M(eps)) is monotone on the relevant range; find the eps budget first.
    double lo = 0.0, hi = 1.0;
    auto rho_of = [&](double e) { return spectral_radius(build_stability_matrix(a, b, k, e).m); };
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        (rho_of(mid) > rho_max ? hi : lo) = mid;
    }
    return bisect_alpha_for_eps(0.5 * (lo + hi), avg_gamma, wf, fbl, tol);
}

Mat6 steady_state_covariance(const StabilityMatrix& sm, const Mat6& sigma_tilde_omega) {
    if (spectral_radius(sm.m) >= 1.0)
        throw InfeasibleError("steady_state_covariance: loop is not mean-square stable");
    const Eigen::Map<const VecX> vec_sigma(sigma_tilde_omega.data(), 36);
    const MatX lhs = MatX::Identity(36, 36) - sm.m;
    const VecX s = lhs.partialPivLu().solve(vec_sigma);
    Mat6 out = Eigen::Map<const Mat6>(s.data());
    return 0.5 * (out + out.transpose()).eval();
}

}  // namespace iscc
