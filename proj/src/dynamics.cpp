#include "iscc/dynamics.hpp"

namespace iscc {

SystemMatrices build_matrices(double dt) {
    if (dt <= 0) throw DomainError("build_matrices: dt must be positive");
    SystemMatrices m;
    m.dt_s = dt;
    m.a.topRightCorner<3, 3>() = dt * Mat3::Identity();
    m.b.topRows<3>() = 0.5 * dt * dt * Mat3::Identity();
    m.b.bottomRows<3>() = dt * Mat3::Identity();
    return m;
}

DroneState step(const DroneState& state, const Vec3& applied_control, const Vec6& noise,
                const SystemMatrices& m) {
    return DroneState::from_stacked(m.a * state.stacked() + m.b * applied_control + noise);
}

double radial_velocity(const DroneState& state, const Geometry& geom) {
    if (geom.range_m <= 0) throw DomainError("radial_velocity: zero range");
    return geom.los_unit.dot(state.velocity_ms);
}

}  // namespace iscc
