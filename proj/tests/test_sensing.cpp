#include <doctest.h>

#include "iscc/sensing.hpp"
#include "oracles.hpp"

using namespace iscc;

namespace {

WaveformConfig small_grid_waveform() {
    WaveformConfig wf;
    wf.num_symbols = 8;
    wf.num_subcarriers = 100;  // alpha_sen = 0.08 -> 8 sensing subcarriers
    return wf;
}

}  // namespace

TEST_CASE("analytic FIM matches the brute-force numeric FIM on an 8x8 grid") {
    const WaveformConfig wf = small_grid_waveform();
    const ArrayConfig arr{2, 4, 0.5};
    const double theta = 0.6, phi = 0.28, gamma_s = 3.7;
    const double tau = 2.0 * 400.0 / kSpeedOfLight, nu = 120.0;
    const int n_sen = 8;
    const double alpha = static_cast<double>(n_sen) / wf.num_subcarriers;
    const CVecX w = conjugate_beamformer(theta, phi, arr);

    const SpatialSignature sig = spatial_signature(theta, phi, arr, w);
    const FimElements f = fim_elements(gamma_s, wf, alpha, sig);
    const Eigen::Matrix4d jn =
        oracle::fim_numeric(tau, theta, phi, nu, gamma_s, wf, n_sen, arr, w);

    CHECK(f.j_tau_tau == doctest::Approx(jn(0, 0)).epsilon(1e-4));
    CHECK(f.j_theta_theta == doctest::Approx(jn(1, 1)).epsilon(1e-4));
    CHECK(f.j_phi_phi == doctest::Approx(jn(2, 2)).epsilon(1e-4));
    CHECK(f.j_theta_phi == doctest::Approx(jn(1, 2)).epsilon(1e-4));
    CHECK(f.j_nu_nu == doctest::Approx(jn(3, 3)).epsilon(1e-4));

    // Cross terms the analytic FIM declares zero, normalised by the diagonal.
    auto normalized = [&](int i, int j) {
        return std::abs(jn(i, j)) / std::sqrt(jn(i, i) * jn(j, j));
    };
    CHECK(normalized(0, 1) < 1e-6);  // tau-theta
    CHECK(normalized(0, 2) < 1e-6);  // tau-phi
    CHECK(normalized(0, 3) < 1e-6);  // tau-nu (centred grid)
    CHECK(normalized(1, 3) < 1e-6);
    CHECK(normalized(2, 3) < 1e-6);

    // Numeric FIM is symmetric by construction.
    CHECK((jn - jn.transpose()).norm() / jn.norm() < 1e-12);
}

TEST_CASE("FIM scaling laws in the sensing fraction") {
    WaveformConfig wf;
    wf.num_subcarriers = 100000;  // large n: continuous-limit scaling
    const ArrayConfig arr{2, 4, 0.5};
    const CVecX w = conjugate_beamformer(0.5, 0.2, arr);
    const SpatialSignature sig = spatial_signature(0.5, 0.2, arr, w);
    const FimElements f1 = fim_elements(1.0, wf, 0.02, sig);
    const FimElements f2 = fim_elements(1.0, wf, 0.04, sig);
    CHECK(f2.j_tau_tau / f1.j_tau_tau == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(f2.j_theta_theta / f1.j_theta_theta == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f2.j_phi_phi / f1.j_phi_phi == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f2.j_nu_nu / f1.j_nu_nu == doctest::Approx(2.0).epsilon(1e-12));

    // Quadrupling the symbol count divides the velocity CRLB by ~64 (M^3 law).
    WaveformConfig wf4 = wf;
    wf4.num_symbols *= 4;
    const FimElements g = fim_elements(1.0, wf4, 0.02, sig);
    CHECK(g.j_nu_nu / f1.j_nu_nu == doctest::Approx(64.0).epsilon(1e-3));
}

TEST_CASE("zero power and scalar arrays degrade the FIM as expected") {
    WaveformConfig wf;
    const ArrayConfig arr{1, 1, 0.5};
    CVecX w(1);
    w[0] = 1.0;
    const SpatialSignature sig = spatial_signature(0.5, 0.2, arr, w);
    const FimElements f = fim_elements(1.0, wf, 0.1, sig);
    CHECK(f.j_theta_theta == doctest::Approx(0.0));
    CHECK(f.j_phi_phi == doctest::Approx(0.0));
    CHECK(f.j_theta_phi == doctest::Approx(0.0));
    CHECK(f.j_tau_tau > 0.0);

    // Angles unidentifiable: the position CRLB must refuse the inversion.
    const Mat3 jac = position_jacobian(1e-6, 0.5, 0.2);
    CHECK_THROWS_AS(crlb_position(fim_position(f), jac), InfeasibleError);

    const ArrayConfig upa{2, 4, 0.5};
    const CVecX w8 = conjugate_beamformer(0.5, 0.2, upa);
    const SpatialSignature s8 = spatial_signature(0.5, 0.2, upa, w8);
    const FimElements z = fim_elements(0.0, wf, 0.1, s8);
    CHECK(z.j_tau_tau == 0.0);
    CHECK(z.j_nu_nu == 0.0);
    CHECK_THROWS_AS(fim_elements(1.0, wf, 0.001, s8), InfeasibleError);
}

TEST_CASE("signature derivatives pass a finite-difference check") {
    const ArrayConfig arr{2, 4, 0.5};
    const CVecX w = conjugate_beamformer(0.4, 0.15, arr);
    const double th = 0.62, ph = 0.21, h = 1e-6;
    const SpatialSignature s = spatial_signature(th, ph, arr, w);
    const CVecX fd_th =
        (spatial_signature(th + h, ph, arr, w).eta - spatial_signature(th - h, ph, arr, w).eta) /
        (2 * h);
    const CVecX fd_ph =
        (spatial_signature(th, ph + h, arr, w).eta - spatial_signature(th, ph - h, arr, w).eta) /
        (2 * h);
    CHECK((s.d_theta - fd_th).norm() / fd_th.norm() < 1e-5);
    CHECK((s.d_phi - fd_ph).norm() / fd_ph.norm() < 1e-5);
}

TEST_CASE("position jacobian: zero-angle form, determinant, and columns") {
    const double tau = 3e-6;
    const Mat3 u0 = position_jacobian(tau, 0.0, 0.0);
    const double c2 = kSpeedOfLight / 2.0;
    CHECK(u0(0, 0) == doctest::Approx(c2));
    CHECK(u0(1, 1) == doctest::Approx(c2 * tau));
    CHECK(u0(2, 2) == doctest::Approx(c2 * tau));
    CHECK(u0(0, 1) == doctest::Approx(0.0));
    CHECK(u0(2, 1) == doctest::Approx(0.0));

    const double th = 0.8, ph = 0.3;
    const Mat3 u = position_jacobian(tau, th, ph);
    CHECK(u.determinant() ==
          doctest::Approx(c2 * c2 * c2 * tau * tau * std::cos(ph)).epsilon(1e-10));

    // Columns equal finite differences of p(tau, theta, phi) = (c tau / 2) u.
    auto pos = [&](double t, double a, double b) -> Vec3 {
        return (kSpeedOfLight * t / 2.0) *
               Vec3{std::cos(b) * std::cos(a), std::cos(b) * std::sin(a), std::sin(b)};
    };
    const double ht = 1e-12, ha = 1e-7;
    const Vec3 d_tau = (pos(tau + ht, th, ph) - pos(tau - ht, th, ph)) / (2 * ht);
    const Vec3 d_th = (pos(tau, th + ha, ph) - pos(tau, th - ha, ph)) / (2 * ha);
    const Vec3 d_ph = (pos(tau, th, ph + ha) - pos(tau, th, ph - ha)) / (2 * ha);
    CHECK((u.col(0) - d_tau).norm() / d_tau.norm() < 1e-6);
    CHECK((u.col(1) - d_th).norm() / d_th.norm() < 1e-6);
    CHECK((u.col(2) - d_ph).norm() / d_ph.norm() < 1e-6);
}

TEST_CASE("position CRLB basics and PEB monotonicity") {
    CHECK((crlb_position(Mat3::Identity(), Mat3::Identity()) - Mat3::Identity()).norm() <
          1e-12);

    const WaveformConfig wf;
    const ArrayConfig arr{2, 4, 0.5};
    const Geometry geom = Geometry::from_position({300.0, 200.0, 180.0});
    const double gs = db_to_linear(20.0);
    SensingBounds prev;
    double last_peb = 1e9;
    for (double a : {0.05, 0.1, 0.2, 0.4}) {
        const SensingBounds b = sensing_bounds(geom, arr, geom.azimuth_rad,
                                               geom.elevation_rad, wf, a, gs);
        Eigen::SelfAdjointEigenSolver<Mat3> es(b.crlb_position_m2);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
        CHECK(b.peb_m() < last_peb);
        last_peb = b.peb_m();
        prev = b;
    }
}

TEST_CASE("velocity CRLB: identity case and monotonicity") {
    const double lam = 0.1249;
    CHECK(crlb_velocity(lam * lam / 4.0, lam) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(crlb_velocity(0.0, lam), InfeasibleError);

    const WaveformConfig wf;
    const ArrayConfig arr{2, 4, 0.5};
    const Geometry geom = Geometry::from_position({300.0, 200.0, 180.0});
    double last = 1e9;
    for (double a : {0.05, 0.1, 0.2, 0.4}) {
        const SensingBounds b = sensing_bounds(geom, arr, geom.azimuth_rad,
                                               geom.elevation_rad, wf, a, 100.0);
        CHECK(b.veb_ms() < last);
        last = b.veb_ms();
    }
}
