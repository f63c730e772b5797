#include <doctest.h>

#include "iscc/estimation.hpp"

using namespace iscc;

namespace {

SensingBounds tiny_bounds(double pos_var, double vel_var) {
    SensingBounds b;
    b.crlb_position_m2 = pos_var * Mat3::Identity();
    b.crlb_radial_velocity_m2s2 = vel_var;
    return b;
}

}  // namespace

TEST_CASE("observation synthesis: zero covariance reproduces C x") {
    DroneState s;
    s.position_m = {120.0, -40.0, 150.0};
    s.velocity_ms = {2.0, 1.0, -0.5};
    const Geometry g = Geometry::from_position(s.position_m);
    Rng rng(5, "obs");
    const Observation obs = synthesize_observation(s, g, tiny_bounds(0.0, 0.0), rng);
    CHECK((obs.y.head<3>() - s.position_m).norm() < 1e-12);
    CHECK(obs.y[3] == doctest::Approx(g.los_unit.dot(s.velocity_ms)).epsilon(1e-12));
    CHECK((obs.c.bottomRightCorner<1, 3>().transpose() - g.los_unit).norm() < 1e-14);
}

TEST_CASE("observation noise matches the requested covariance") {
    DroneState s;
    s.position_m = {100.0, 50.0, 120.0};
    const Geometry g = Geometry::from_position(s.position_m);
    SensingBounds b;
    b.crlb_position_m2 << 0.04, 0.01, 0.0, 0.01, 0.09, 0.0, 0.0, 0.0, 0.02;
    b.crlb_radial_velocity_m2s2 = 4e-4;
    Rng rng(11, "obs-cov");
    Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
    const int n = 100000;
    Eigen::Matrix4d target = Eigen::Matrix4d::Zero();
    target.topLeftCorner<3, 3>() = b.crlb_position_m2;
    target(3, 3) = b.crlb_radial_velocity_m2s2;
    const Eigen::Vector4d mean_y = observation_matrix(g.los_unit) * s.stacked();
    for (int i = 0; i < n; ++i) {
        const Observation o = synthesize_observation(s, g, b, rng);
        const Eigen::Vector4d d = o.y - mean_y;
        cov += d * d.transpose();
    }
    cov /= n;
    CHECK((cov - target).norm() / target.norm() < 0.05);
}

TEST_CASE("predict-only step matches the model") {
    const SystemMatrices m = build_matrices(0.1);
    const ProcessNoise pn{0.2, 0.002};
    KalmanState kf;
    kf.estimate << 1, 2, 3, 0.5, -0.5, 0.1;
    kf.covariance = 2.0 * Mat6::Identity();
    const Vec3 u{0.1, 0.0, -0.2};
    KalmanState pred = kf;
    kalman_predict(pred, u, m, pn);
    CHECK((pred.estimate - (m.a * kf.estimate + m.b * u)).norm() < 1e-12);
    const Mat6 expect = m.a * kf.covariance * m.a.transpose() + pn.covariance();
    CHECK((pred.covariance - expect).norm() < 1e-12);
}

TEST_CASE("scalar stationary Riccati fixed point") {
    // 1-D system A=1, C=1: sigma^2 converges to (q + sqrt(q^2 + 4 q r)) / 2.
    const double q = 0.3, r = 1.7;
    double sigma = 1.0;
    for (int i = 0; i < 10000; ++i) {
        const double pred = sigma + q;
        sigma = pred - pred * pred / (pred + r);
    }
    const double expect = 0.5 * (q + std::sqrt(q * q + 4 * q * r));
    CHECK(sigma == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("near-exact measurements pin the position block") {
    const SystemMatrices m = build_matrices(0.1);
    const ProcessNoise pn{0.2, 0.002};
    DroneState truth;
    truth.position_m = {200.0, 100.0, 150.0};
    truth.velocity_ms = {1.0, 2.0, -1.0};
    const Geometry g = Geometry::from_position(truth.position_m);
    Rng rng(3, "exact");
    const Observation obs = synthesize_observation(truth, g, tiny_bounds(1e-12, 1e-12), rng);
    KalmanState kf;
    kf.estimate.setZero();
    kf.covariance = 100.0 * Mat6::Identity();
    const KalmanState post = kalman_step(kf, Vec3::Zero(), obs, m, pn);
    CHECK((post.estimate.head<3>() - truth.position_m).norm() < 1e-3);
    CHECK((post.covariance - post.covariance.transpose()).norm() < 1e-12);
}

TEST_CASE("steady covariance: exact position measurements empty the position block") {
    const SystemMatrices m = build_matrices(0.1);
    const ProcessNoise pn{0.2, 0.002};
    const Vec3 u{1.0, 0.0, 0.0};
    Eigen::Matrix4d r = Eigen::Matrix4d::Identity() * 1e-12;
    const Mat6 s = steady_estimation_covariance(m, pn, observation_matrix(u), r);
    CHECK(s.topLeftCorner<3, 3>().trace() < 1e-9);
}

TEST_CASE("steady covariance is a fixed point and grows with the noise floor") {
    const SystemMatrices m = build_matrices(0.1);
    const ProcessNoise pn{0.2, 0.002};
    const Vec3 u = Vec3{1.0, 2.0, 2.0}.normalized();
    const auto c = observation_matrix(u);
    Eigen::Matrix4d r_small = Eigen::Matrix4d::Identity() * 0.01;
    Eigen::Matrix4d r_big = Eigen::Matrix4d::Identity() * 1.0;
    const Mat6 s1 = steady_estimation_covariance(m, pn, c, r_small);
    const Mat6 s2 = steady_estimation_covariance(m, pn, c, r_big);

    // Fixed point: one more iteration moves nothing.
    const Mat6 pred = m.a * s1 * m.a.transpose() + pn.covariance();
    const Eigen::Matrix4d sinn = c * pred * c.transpose() + r_small;
    const Eigen::Matrix<double, 6, 4> k = (sinn.ldlt().solve(c * pred)).transpose();
    const Mat6 ikc = Mat6::Identity() - k * c;
    const Mat6 again = ikc * pred * ikc.transpose() + k * r_small * k.transpose();
    CHECK((again - s1).norm() / s1.norm() < 1e-8);

    // Loewner ordering at two noise levels.
    Eigen::SelfAdjointEigenSolver<Mat6> es(s2 - s1);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
}

TEST_CASE("NEES consistency over a 200-slot linear run") {
    const SystemMatrices m = build_matrices(0.1);
    const ProcessNoise pn{0.2, 0.002};
    const Vec3 u = Vec3{0.0, 1.0, 0.0};
    const auto c = observation_matrix(u);
    Eigen::Matrix4d r_cov = Eigen::Matrix4d::Zero();
    r_cov.topLeftCorner<3, 3>() = 0.09 * Mat3::Identity();
    r_cov(3, 3) = 1e-4;

    Rng rng(17, "nees");
    Vec6 truth = Vec6::Zero();
    KalmanState kf;
    kf.estimate.setZero();
    kf.covariance = Mat6::Identity();
    double nees = 0.0;
    const int slots = 200;
    const Eigen::Matrix4d l = r_cov.llt().matrixL();
    for (int n = 0; n < slots; ++n) {
        // Truth propagation with process noise only.
        truth = m.a * truth + ProcessNoise(pn).draw(rng);
        kalman_predict(kf, Vec3::Zero(), m, pn);
        Eigen::Vector4d noise;
        for (int i = 0; i < 4; ++i) noise[i] = rng.normal();
        const Eigen::Vector4d y = c * truth + l * noise;
        kalman_update<4>(kf, c, y, r_cov);
        const Vec6 e = truth - kf.estimate;
        nees += e.dot(kf.covariance.ldlt().solve(e));
        CHECK((kf.covariance - kf.covariance.transpose()).norm() < 1e-12);
    }
    nees /= slots;
    CHECK(nees > 4.8);
    CHECK(nees < 7.2);
}
