#pragma once

#include "iscc/channel.hpp"
#include "iscc/rng.hpp"
#include "iscc/types.hpp"

namespace iscc {

/// Stacked drone state x = [p^T v^T]^T.
struct DroneState {
    Vec3 position_m = Vec3::Zero();
    Vec3 velocity_ms = Vec3::Zero();

    Vec6 stacked() const {
        Vec6 x;
        x << position_m, velocity_ms;
        return x;
    }
    static DroneState from_stacked(const Vec6& x) {
        return {x.head<3>(), x.tail<3>()};
    }
};

/// Discretised double-integrator matrices for one slot.
struct SystemMatrices {
    Mat6 a = Mat6::Identity();
    Mat63 b = Mat63::Zero();
    double dt_s = 0.1;
};

/// Per-slot i.i.d. process noise, per-axis variances.
struct ProcessNoise {
    double sigma_p2_m2 = 0.055;
    double sigma_v2_m2s2 = 2e-5;

    Mat6 covariance() const {
        Vec6 d;
        d << sigma_p2_m2, sigma_p2_m2, sigma_p2_m2, sigma_v2_m2s2, sigma_v2_m2s2,
            sigma_v2_m2s2;
        return d.asDiagonal();
    }
    Vec6 draw(Rng& rng) const {
        Vec6 w;
        const double sp = std::sqrt(sigma_p2_m2), sv = std::sqrt(sigma_v2_m2s2);
        for (int i = 0; i < 3; ++i) w[i] = sp * rng.normal();
        for (int i = 3; i < 6; ++i) w[i] = sv * rng.normal();
        return w;
    }
};

SystemMatrices build_matrices(double dt);

/// One slot of x+ = A x + B u + w.
DroneState step(const DroneState& state, const Vec3& applied_control, const Vec6& noise,
                const SystemMatrices& m);

/// Velocity projected on the LoS direction.
double radial_velocity(const DroneState& state, const Geometry& geom);

}  // namespace iscc
