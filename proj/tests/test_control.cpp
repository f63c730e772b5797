#include <doctest.h>

#include "iscc/control.hpp"
#include "iscc/stability.hpp"

using namespace iscc;

TEST_CASE("scalar DARE has the golden-ratio fixed point") {
    MatX a(1, 1), b(1, 1), q(1, 1), r(1, 1);
    a << 1.0;
    b << 1.0;
    q << 1.0;
    r << 1.0;
    const MatX p = solve_dare(a, b, q, r);
    CHECK(p(0, 0) == doctest::Approx(0.5 * (1.0 + std::sqrt(5.0))).epsilon(1e-10));

    q << 0.0;
    CHECK(solve_dare(a, b, q, r)(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("DARE residual and closed-loop stability on the default system") {
    const SystemMatrices m = build_matrices(0.1);
    const LqgWeights w;
    const LqgSynthesis lqg = synthesize_lqg(m, w);
    const Mat6 rhs = m.a.transpose() * lqg.p * m.a -
                     m.a.transpose() * lqg.p * m.b *
                         (w.r() + m.b.transpose() * lqg.p * m.b)
                             .ldlt()
                             .solve(m.b.transpose() * lqg.p * m.a) +
                     w.q();
    CHECK((lqg.p - rhs).norm() / lqg.p.norm() < 1e-9);
    CHECK(spectral_radius(m.a - m.b * lqg.k) < 1.0);
}

TEST_CASE("near-free control drives the loop toward deadbeat") {
    const SystemMatrices m = build_matrices(0.1);
    LqgWeights w;
    w.q_position = 1.0;
    w.q_velocity = 1.0;
    w.r_control = 1e-8;
    const LqgSynthesis lqg = synthesize_lqg(m, w);
    CHECK(spectral_radius(m.a - m.b * lqg.k) < 0.05);
}

TEST_CASE("LQG command is linear in the tracking error with the right sign") {
    const SystemMatrices m = build_matrices(0.1);
    const LqgSynthesis lqg = synthesize_lqg(m, LqgWeights{});
    Vec6 ref;
    ref << 10, 20, 30, 1, 0, 0;
    CHECK(lqg_command(ref, ref, lqg.k).norm() == doctest::Approx(0.0));

    Vec6 ahead = ref;
    ahead[0] += 2.0;  // overshoot along +x
    const Vec3 u = lqg_command(ahead, ref, lqg.k);
    CHECK(u.x() < 0.0);

    // Linearity in the error.
    Vec6 e1 = Vec6::Random(), e2 = Vec6::Random();
    const Vec3 lhs = lqg_command(ref + e1 + e2, ref, lqg.k);
    const Vec3 rhs = lqg_command(ref + e1, ref, lqg.k) + lqg_command(ref + e2, ref, lqg.k);
    CHECK((lhs - rhs).norm() < 1e-10);
}

TEST_CASE("empirical cost vanishes on perfect tracking") {
    Vec6 state;
    state << 1, 2, 3, 0.1, 0.2, 0.3;
    const std::vector<Vec6> xs(10, state), refs(10, state);
    const std::vector<Vec3> us(10, Vec3::Zero());
    const EmpiricalCost c = empirical_lqg_cost(xs, us, refs, LqgWeights{});
    CHECK(c.error_cost == doctest::Approx(0.0));
    CHECK(c.absolute_cost > 0.0);  // literal reading penalises the reference itself
}

TEST_CASE("coupled Riccati: lossless case recovers the DARE pair") {
    const SystemMatrices m = build_matrices(0.1);
    const LqgWeights w;
    const LqgSynthesis lqg = synthesize_lqg(m, w);
    const CoupledRiccati ds = coupled_riccati_ds(m, w, 0.0);
    CHECK((ds.s - lqg.p).norm() / lqg.p.norm() < 1e-8);
    const Eigen::Matrix<double, 3, 6> bts = m.b.transpose() * ds.s;
    const Mat6 d_expect = bts.transpose() * (w.r() + bts * m.b).ldlt().solve(bts);
    CHECK((ds.d - d_expect).norm() / d_expect.norm() < 1e-9);

    // Residual of both fixed-point equations.
    const Mat6 s_rhs = w.q() + m.a.transpose() * (ds.s - ds.d) * m.a;
    CHECK((ds.s - s_rhs).norm() / ds.s.norm() < 1e-9);

    // D is positive semidefinite.
    Eigen::SelfAdjointEigenSolver<Mat6> es(ds.d);
    CHECK(es.eigenvalues().minCoeff() > -1e-9 * es.eigenvalues().maxCoeff());
}

TEST_CASE("coupled Riccati diverges when every packet is lost") {
    const SystemMatrices m = build_matrices(0.1);
    CHECK_THROWS_AS(coupled_riccati_ds(m, LqgWeights{}, 1.0, 1e-10, 3000),
                    InfeasibleError);
    // At eps = 1 the first iterate already has D = 0.
    // (S = Q gives D = (1-1) * ... = 0 identically.)
    const CoupledRiccati mid = coupled_riccati_ds(m, LqgWeights{}, 0.3);
    CHECK(mid.iterations > 0);
}

TEST_CASE("entropy power identity and pseudo-determinant") {
    Mat6 sigma = Mat6::Zero();
    sigma.diagonal() << 0.3, 0.3, 0.3, 0.01, 0.01, 0.01;
    // Gaussian entropy power via the differential-entropy route:
    // N = exp(2 h / n) / (2 pi e) with h = 0.5 ln((2 pi e)^n det).
    const double h = 0.5 * std::log(std::pow(2.0 * M_PI * M_E, 6.0) * sigma.determinant());
    const double n_from_h = std::exp(2.0 * h / 6.0) / (2.0 * M_PI * M_E);
    CHECK(gaussian_entropy_power(sigma) == doctest::Approx(n_from_h).epsilon(1e-12));

    // Identity covariance has unit entropy power.
    CHECK(gaussian_entropy_power(MatX::Identity(6, 6)) == doctest::Approx(1.0).epsilon(1e-14));

    // Pseudo-determinant skips the null space of a rank-deficient matrix.
    MatX d = MatX::Zero(4, 4);
    d.diagonal() << 2.0, 5.0, 0.0, 0.0;
    CHECK(pseudo_determinant(d) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(pseudo_determinant(MatX::Identity(3, 3)) == doctest::Approx(1.0));
}

TEST_CASE("b_min floor: zero noise, scalar case, and linear scaling") {
    const SystemMatrices m = build_matrices(0.1);
    const LqgSynthesis lqg = synthesize_lqg(m, LqgWeights{});
    CHECK(b_min_floor(lqg.p, Mat6::Zero()) == doctest::Approx(0.0));

    // Scalar A=B=Q=R=1 with unit noise: b_min = P = golden ratio.
    MatX a(1, 1), b(1, 1), q(1, 1), r(1, 1);
    a << 1;
    b << 1;
    q << 1;
    r << 1;
    const double p_scalar = solve_dare(a, b, q, r)(0, 0);
    CHECK(p_scalar == doctest::Approx(1.6180339887).epsilon(1e-9));

    const Mat6 s1 = 0.1 * Mat6::Identity();
    CHECK(b_min_floor(lqg.p, 3.0 * s1) ==
          doctest::Approx(3.0 * b_min_floor(lqg.p, s1)).epsilon(1e-12));
}

TEST_CASE("rate-cost function: limits, monotonicity, convexity") {
    const SystemMatrices m = build_matrices(0.1);
    const LqgWeights w;
    const CoupledRiccati ds = coupled_riccati_ds(m, w, 0.1);
    Mat6 sigma = Mat6::Zero();
    sigma.diagonal() << 0.055, 0.055, 0.055, 2e-5, 2e-5, 2e-5;
    const double b_min = 100.0;

    // det A = 1 for the double integrator, so L -> 0 as b -> infinity.
    CHECK(rate_cost_l(1e12, m.a, ds.d, sigma, b_min) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK_THROWS_AS(rate_cost_l(99.0, m.a, ds.d, sigma, b_min), InfeasibleError);

    // Halving the slack doubles the fraction inside the log.
    const double n_om = gaussian_entropy_power(sigma);
    const double det_d = std::pow(std::abs(pseudo_determinant(ds.d)), 1.0 / 6.0);
    const double l1 = rate_cost_l(b_min + 2.0, m.a, ds.d, sigma, b_min);
    const double frac1 = std::pow(2.0, l1 / 3.0) - 1.0;
    const double l2 = rate_cost_l(b_min + 1.0, m.a, ds.d, sigma, b_min);
    const double frac2 = std::pow(2.0, l2 / 3.0) - 1.0;
    CHECK(frac2 == doctest::Approx(2.0 * frac1).epsilon(1e-9));
    CHECK(frac1 == doctest::Approx(6.0 * n_om * det_d / 2.0).epsilon(1e-9));

    // Strictly decreasing, convex in b (sampled second differences).
    double prev = 1e18;
    std::vector<double> vals;
    for (double bb = b_min + 0.5; bb < b_min + 8.0; bb += 0.5) {
        const double l = rate_cost_l(bb, m.a, ds.d, sigma, b_min);
        CHECK(l < prev);
        prev = l;
        vals.push_back(l);
    }
    for (std::size_t i = 1; i + 1 < vals.size(); ++i)
        CHECK(vals[i + 1] - 2 * vals[i] + vals[i - 1] >= -1e-9);
}
