#include "iscc/estimation.hpp"

namespace iscc {

Eigen::Matrix<double, 4, 6> observation_matrix(const Vec3& los_unit) {
    Eigen::Matrix<double, 4, 6> c = Eigen::Matrix<double, 4, 6>::Zero();
    c.topLeftCorner<3, 3>() = Mat3::Identity();
    c.bottomRightCorner<1, 3>() = los_unit.transpose();
    return c;
}

namespace {

// Square root of a PSD matrix, tolerant of tiny negative eigenvalues.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.eigenvalues().minCoeff() < -1e-9 * std::abs(es.eigenvalues().maxCoeff()))
        throw DomainError("psd_sqrt: covariance is not positive semidefinite");
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

Observation synthesize_observation(const DroneState& truth, const Geometry& geom,
                                   const SensingBounds& bounds, Rng& rng) {
    Observation obs;
    obs.c = observation_matrix(geom.los_unit);
    obs.noise_cov.topLeftCorner<3, 3>() = bounds.crlb_position_m2;
    obs.noise_cov(3, 3) = bounds.crlb_radial_velocity_m2s2;
    Eigen::Vector4d noise;
    const Eigen::MatrixXd l = psd_sqrt(obs.noise_cov);
    for (int i = 0; i < 4; ++i) noise[i] = rng.normal();
    obs.y = obs.c * truth.stacked() + l * noise;
    return obs;
}

void kalman_predict(KalmanState& kf, const Vec3& applied_control, const SystemMatrices& m,
                    const ProcessNoise& w) {
    kf.estimate = m.a * kf.estimate + m.b * applied_control;
    kf.covariance = m.a * kf.covariance * m.a.transpose() + w.covariance();
    kf.covariance = 0.5 * (kf.covariance + kf.covariance.transpose()).eval();
}

KalmanState kalman_step(const KalmanState& prior, const Vec3& applied_control,
                        const Observation& obs, const SystemMatrices& m,
                        const ProcessNoise& w) {
    KalmanState kf = prior;
    kalman_predict(kf, applied_control, m, w);
    kalman_update<4>(kf, obs.c, obs.y, obs.noise_cov);
    return kf;
}

Mat6 steady_estimation_covariance(const SystemMatrices& m, const ProcessNoise& w,
                                  const Eigen::Matrix<double, 4, 6>& c_bar,
                                  const Eigen::Matrix4d& r_bar, double tol, int max_iters) {
    Mat6 sigma = Mat6::Identity();
    const Mat6 q = w.covariance();
    for (int i = 0; i < max_iters; ++i) {
        const Mat6 pred = m.a * sigma * m.a.transpose() + q;
        const Eigen::Matrix4d s = c_bar * pred * c_bar.transpose() + r_bar;
        const Eigen::Matrix<double, 6, 4> k = (s.ldlt().solve(c_bar * pred)).transpose();
        const Mat6 ikc = Mat6::Identity() - k * c_bar;
        Mat6 next = ikc * pred * ikc.transpose() + k * r_bar * k.transpose();
        next = 0.5 * (next + next.transpose()).eval();
        if ((next - sigma).norm() <= tol * std::max(1.0, next.norm())) return next;
        sigma = next;
    }
    throw NonConvergenceError("steady_estimation_covariance: no fixed point reached");
}

}  // namespace iscc
