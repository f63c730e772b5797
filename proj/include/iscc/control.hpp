#pragma once

#include <vector>

#include "iscc/dynamics.hpp"

namespace iscc {

/// Quadratic tracking weights Q = blkdiag(Qp I3, Qv I3), R > 0.
struct LqgWeights {
    double q_position = 1e4;
    double q_velocity = 1e2;
    double r_control = 0.01;

    Mat6 q() const {
        Vec6 d;
        d << q_position, q_position, q_position, q_velocity, q_velocity, q_velocity;
        return d.asDiagonal();
    }
    Mat3 r() const { return r_control * Mat3::Identity(); }
};

/// DARE solution and the induced feedback gain.
struct LqgSynthesis {
    Mat6 p = Mat6::Zero();
    Mat36 k = Mat36::Zero();
};

/// Iterates the Riccati map to the stated relative residual.
MatX solve_dare(const MatX& a, const MatX& b, const MatX& q, const MatX& r,
                double tol = 1e-12, int max_iters = 100000);

LqgSynthesis synthesize_lqg(const SystemMatrices& m, const LqgWeights& w);

/// u = -K (x_hat - x_ref).
Vec3 lqg_command(const Vec6& estimate, const Vec6& reference, const Mat36& gain);

/// Time-averaged quadratic cost in error coordinates; `absolute_cost` reports
/// the literal x^T Q x reading alongside for diagnostics.
struct EmpiricalCost {
    double error_cost = 0.0;
    double absolute_cost = 0.0;
};
EmpiricalCost empirical_lqg_cost(const std::vector<Vec6>& states,
                                 const std::vector<Vec3>& applied_controls,
                                 const std::vector<Vec6>& references, const LqgWeights& w);

/// Coupled pair of the drop-rate-modified Riccati equations:
///   D = (1-eps) S B (R + B^T S B)^{-1} B^T S,   S = Q + A^T (S - D) A.
struct CoupledRiccati {
    Mat6 d = Mat6::Zero();
    Mat6 s = Mat6::Zero();
    int iterations = 0;
};
CoupledRiccati coupled_riccati_ds(const SystemMatrices& m, const LqgWeights& w,
                                  double eps_ctrl, double tol = 1e-10,
                                  int max_iters = 100000);

/// Entropy power of a Gaussian with the given covariance: det(Sigma)^{1/n}.
double gaussian_entropy_power(const MatX& sigma);

/// Product of eigenvalues above a rank tolerance; det for full-rank input.
double pseudo_determinant(const MatX& m, double rank_tol = 1e-9);

/// Minimum achievable cost under perfect observation and lossless control.
double b_min_floor(const Mat6& p, const Mat6& sigma_omega);

/// Rate-cost function in bits per slot:
///   L(b) = log2|det A| + (n/2) log2(1 + n N(w) |det D|^{1/n} / (b - b_min)).
/// |det D| is the pseudo-determinant (D is rank-deficient whenever there are
/// fewer inputs than states).
double rate_cost_l(double b, const Mat6& a, const Mat6& d, const Mat6& sigma_tilde_omega,
                   double b_min);

}  // namespace iscc
