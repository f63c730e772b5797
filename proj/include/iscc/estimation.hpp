#pragma once

#include "iscc/dynamics.hpp"
#include "iscc/sensing.hpp"

namespace iscc {

/// ISAC observation y = [p_hat; v_r_hat] with C = blkdiag(I3, g^T).
struct Observation {
    Eigen::Vector4d y = Eigen::Vector4d::Zero();
    Eigen::Matrix<double, 4, 6> c = Eigen::Matrix<double, 4, 6>::Zero();
    Eigen::Matrix4d noise_cov = Eigen::Matrix4d::Zero();
};

/// Kalman estimate and covariance.
struct KalmanState {
    Vec6 estimate = Vec6::Zero();
    Mat6 covariance = Mat6::Identity();
};

/// Observation matrix for a given LoS direction.
Eigen::Matrix<double, 4, 6> observation_matrix(const Vec3& los_unit);

/// Draw y = C x + v with v ~ N(0, blkdiag(CRLB_p, CRLB_vr)).
Observation synthesize_observation(const DroneState& truth, const Geometry& geom,
                                   const SensingBounds& bounds, Rng& rng);

/// Generic measurement update with a Joseph-form covariance step. The prior
/// must already be the one-step prediction.
template <int NY>
void kalman_update(KalmanState& kf, const Eigen::Matrix<double, NY, 6>& c,
                   const Eigen::Matrix<double, NY, 1>& y,
                   const Eigen::Matrix<double, NY, NY>& r_cov) {
    const Eigen::Matrix<double, NY, NY> s = c * kf.covariance * c.transpose() + r_cov;
    const auto ldlt = s.ldlt();
    if (ldlt.info() != Eigen::Success)
        throw NonConvergenceError("kalman_update: singular innovation covariance");
    const Eigen::Matrix<double, 6, NY> k =
        (ldlt.solve(c * kf.covariance)).transpose();
    kf.estimate += k * (y - c * kf.estimate);
    const Mat6 ikc = Mat6::Identity() - k * c;
    kf.covariance = ikc * kf.covariance * ikc.transpose() + k * r_cov * k.transpose();
    kf.covariance = 0.5 * (kf.covariance + kf.covariance.transpose()).eval();
}

/// Time update x+ = A x + B u, Sigma+ = A Sigma A^T + Q.
void kalman_predict(KalmanState& kf, const Vec3& applied_control, const SystemMatrices& m,
                    const ProcessNoise& w);

/// Full predict+update step against an ISAC observation.
KalmanState kalman_step(const KalmanState& prior, const Vec3& applied_control,
                        const Observation& obs, const SystemMatrices& m,
                        const ProcessNoise& w);

/// Fixed point of the filter Riccati recursion for a constant observation
/// model; used by the stability and rate-cost analyses.
Mat6 steady_estimation_covariance(const SystemMatrices& m, const ProcessNoise& w,
                                  const Eigen::Matrix<double, 4, 6>& c_bar,
                                  const Eigen::Matrix4d& r_bar, double tol = 1e-9,
                                  int max_iters = 100000);

}  // namespace iscc
