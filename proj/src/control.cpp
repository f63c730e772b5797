#include "iscc/control.hpp"

#include <cmath>

namespace iscc {

MatX solve_dare(const MatX& a, const MatX& b, const MatX& q, const MatX& r, double tol,
                int max_iters) {
    MatX p = q;
    for (int i = 0; i < max_iters; ++i) {
        const MatX btp = b.transpose() * p;
        const MatX gain = (r + btp * b).ldlt().solve(btp * a);
        MatX next = a.transpose() * p * a - a.transpose() * p * b * gain + q;
        next = 0.5 * (next + next.transpose()).eval();
        const double res = (next - p).norm() / std::max(1.0, next.norm());
        p = next;
        if (res <= tol) return p;
    }
    throw NonConvergenceError("solve_dare: no convergence after " +
                              std::to_string(max_iters) + " iterations");
}

LqgSynthesis synthesize_lqg(const SystemMatrices& m, const LqgWeights& w) {
    LqgSynthesis s;
    s.p = solve_dare(m.a, m.b, w.q(), w.r());
    s.k = (w.r() + m.b.transpose() * s.p * m.b).ldlt().solve(m.b.transpose() * s.p * m.a);
    return s;
}

Vec3 lqg_command(const Vec6& estimate, const Vec6& reference, const Mat36& gain) {
    return -gain * (estimate - reference);
}

EmpiricalCost empirical_lqg_cost(const std::vector<Vec6>& states,
                                 const std::vector<Vec3>& applied_controls,
                                 const std::vector<Vec6>& references, const LqgWeights& w) {
    if (states.empty() || states.size() != applied_controls.size() ||
        states.size() != references.size())
        throw DomainError("empirical_lqg_cost: need equal, nonzero trajectory lengths");
    const Mat6 q = w.q();
    const Mat3 r = w.r();
    EmpiricalCost c;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const Vec6 e = states[i] - references[i];
        const double uru = applied_controls[i].dot(r * applied_controls[i]);
        c.error_cost += e.dot(q * e) + uru;
        c.absolute_cost += states[i].dot(q * states[i]) + uru;
    }
    c.error_cost /= static_cast<double>(states.size());
    c.absolute_cost /= static_cast<double>(states.size());
    return c;
}

CoupledRiccati coupled_riccati_ds(const SystemMatrices& m, const LqgWeights& w,
                                  double eps_ctrl, double tol, int max_iters) {
    if (eps_ctrl < 0.0 || eps_ctrl > 1.0)
        throw DomainError("coupled_riccati_ds: eps outside [0,1]");
    CoupledRiccati out;
    Mat6 s = w.q();
    const Mat3 r = w.r();
    for (int i = 0; i < max_iters; ++i) {
        const Eigen::Matrix<double, 3, 6> bts = m.b.transpose() * s;
        const Mat6 d =
            (1.0 - eps_ctrl) * bts.transpose() * (r + bts * m.b).ldlt().solve(bts);
        Mat6 next = w.q() + m.a.transpose() * (s - d) * m.a;
        next = 0.5 * (next + next.transpose()).eval();
        const double res = (next - s).norm() / std::max(1.0, next.norm());
        if (next.norm() > 1e18)
            throw InfeasibleError("coupled_riccati_ds: S diverges at this drop rate");
        s = next;
        if (res <= tol) {
            const Eigen::Matrix<double, 3, 6> bts_final = m.b.transpose() * s;
            out.s = s;
            out.d = (1.0 - eps_ctrl) * bts_final.transpose() *
                    (r + bts_final * m.b).ldlt().solve(bts_final);
            out.iterations = i + 1;
            return out;
        }
    }
    throw InfeasibleError("coupled_riccati_ds: no fixed point (drop rate too high)");
}

double pseudo_determinant(const MatX& m, double rank_tol) {
    Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (m + m.transpose()));
    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    if (scale <= 0.0) return 0.0;
    double det = 1.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (std::abs(lam) > rank_tol * scale) det *= lam;
    }
    return det;
}

double gaussian_entropy_power(const MatX& sigma) {
    const double n = static_cast<double>(sigma.rows());
    const double det = sigma.determinant();
    if (det < 0.0) throw DomainError("gaussian_entropy_power: invalid covariance");
    return std::pow(det, 1.0 / n);
}

double b_min_floor(const Mat6& p, const Mat6& sigma_omega) {
    return (p * sigma_omega).trace();
}

double rate_cost_l(double b, const Mat6& a, const Mat6& d, const Mat6& sigma_tilde_omega,
                   double b_min) {
    if (b <= b_min) throw InfeasibleError("rate_cost_l: target below the cost floor");
    const double n = 6.0;
    const double log_det_a = std::log2(std::abs(a.determinant()));
    const double entropy_power = gaussian_entropy_power(sigma_tilde_omega);
    const double det_d = std::abs(pseudo_determinant(d));
    const double frac = n * entropy_power * std::pow(det_d, 1.0 / n) / (b - b_min);
    return log_det_a + (n / 2.0) * std::log2(1.0 + frac);
}

}  // namespace iscc
