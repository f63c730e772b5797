#pragma once

#include <functional>
#include <optional>

#include "iscc/channel.hpp"
#include "iscc/control.hpp"

namespace iscc {

/// Covariance-evolution matrix of the lossy closed loop,
///   M = (1-eps) (A-BK) kron (A-BK) + eps (A kron A).
struct StabilityMatrix {
    MatX m;
    double eps_ctrl = 0.0;
    Mat6 closed_loop;  // A - BK
};

MatX kron(const MatX& a, const MatX& b);

StabilityMatrix build_stability_matrix(const Mat6& a, const Mat63& b, const Mat36& k,
                                       double eps);

/// Largest eigenvalue magnitude (general, non-symmetric matrices).
double spectral_radius(const MatX& m);

/// Bisection root of rho(M(eps)) = 1; requires a crossing inside (0,1).
double critical_eps(const Mat6& a, const Mat63& b, const Mat36& k, double tol = 1e-5);

/// Smallest alpha_ctrl whose drop rate meets the target eps under the given
/// average SNR; mapping is monotone decreasing.
double critical_alpha_ctrl(double eps_target, double avg_gamma, const WaveformConfig& wf,
                           const FblParams& fbl, double tol = 1e-7);

/// Smallest alpha_ctrl with rho(M(eps(alpha))) <= rho_max. Generalises
/// critical_alpha_ctrl to a margined stability requirement.
double alpha_for_rho(double rho_max, const Mat6& a, const Mat63& b, const Mat36& k,
                     double avg_gamma, const WaveformConfig& wf, const FblParams& fbl,
                     double tol = 1e-7);

/// Steady-state covariance vec(S) = (I-M)^{-1} vec(Sigma); requires rho(M)<1.
Mat6 steady_state_covariance(const StabilityMatrix& sm, const Mat6& sigma_tilde_omega);

/// Summary for reports and sweeps.
struct StabilityReport {
    double spectral_radius_at_eps = 0.0;
    double eps_star = 0.0;
    double alpha_ctrl_star = 0.0;
    std::optional<Mat6> steady_state_cov;
};

}  // namespace iscc
