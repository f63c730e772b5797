#include "iscc/trajectory.hpp"

#include <cmath>

namespace iscc {

double CoverageRegion::volume_m3() const {
    // Slab of the ball between the two altitude planes.
    auto cap = [&](double z) {
        return M_PI * (radius_m * radius_m * z - z * z * z / 3.0);
    };
    return cap(altitude_max_m) - cap(altitude_min_m);
}

CubicSpline::CubicSpline(std::vector<double> knot_times, std::vector<Vec3> knots)
    : t_(std::move(knot_times)), y_(std::move(knots)) {
    const int n = static_cast<int>(y_.size());
    if (n < 4 || t_.size() != y_.size())
        throw DomainError("CubicSpline: need at least 4 knots with matching times");
    for (int i = 1; i < n; ++i) {
        if (t_[i] <= t_[i - 1]) throw DomainError("CubicSpline: knot times must increase");
        if ((y_[i] - y_[i - 1]).norm() < 1e-12)
            throw DomainError("CubicSpline: duplicate consecutive waypoints");
    }
    // Natural boundary: second derivative zero at both ends. Thomas solve of
    // the standard tridiagonal moment system, vectorised over axes.
    m_.assign(n, Vec3::Zero());
    std::vector<double> h(n - 1);
    for (int i = 0; i < n - 1; ++i) h[i] = t_[i + 1] - t_[i];
    std::vector<double> diag(n, 2.0), upper(n, 0.0);
    std::vector<Vec3> rhs(n, Vec3::Zero());
    std::vector<double> mu(n, 0.0);
    for (int i = 1; i < n - 1; ++i) {
        const double hs = h[i - 1] + h[i];
        mu[i] = h[i - 1] / hs;
        upper[i] = h[i] / hs;
        rhs[i] = 6.0 / hs * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    std::vector<double> c(n, 0.0);
    std::vector<Vec3> d(n, Vec3::Zero());
    for (int i = 1; i < n - 1; ++i) {
        const double w = diag[i] - mu[i] * c[i - 1];
        c[i] = upper[i] / w;
        d[i] = (rhs[i] - mu[i] * d[i - 1]) / w;
    }
    for (int i = n - 2; i >= 1; --i) m_[i] = d[i] - c[i] * m_[i + 1];
}

int CubicSpline::segment(double t) const {
    const int n = static_cast<int>(t_.size());
    if (t <= t_.front()) return 0;
    if (t >= t_.back()) return n - 2;
    const auto it = std::upper_bound(t_.begin(), t_.end(), t);
    return static_cast<int>(it - t_.begin()) - 1;
}

Vec3 CubicSpline::position(double t) const {
    const int i = segment(t);
    const double h = t_[i + 1] - t_[i];
    const double a = (t_[i + 1] - t) / h, b = (t - t_[i]) / h;
    return a * y_[i] + b * y_[i + 1] +
           ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * (h * h) / 6.0;
}

Vec3 CubicSpline::velocity(double t) const {
    const int i = segment(t);
    const double h = t_[i + 1] - t_[i];
    const double a = (t_[i + 1] - t) / h, b = (t - t_[i]) / h;
    return (y_[i + 1] - y_[i]) / h +
           ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
}

Vec3 CubicSpline::acceleration(double t) const {
    const int i = segment(t);
    const double h = t_[i + 1] - t_[i];
    const double a = (t_[i + 1] - t) / h, b = (t - t_[i]) / h;
    return a * m_[i] + b * m_[i + 1];
}

std::vector<Vec3> poisson_waypoints(Rng& rng, double mean_count, const CoverageRegion& region,
                                    double shrink_margin) {
    if (region.volume_m3() <= 0.0) throw DomainError("poisson_waypoints: empty region");
    int count = 0;
    while (count < 4) count = rng.poisson(mean_count);
    // Draw inside a slightly shrunken shell so the interpolating spline has
    // room to stay inside the full region.
    const double alt_span = region.altitude_max_m - region.altitude_min_m;
    const double zlo = region.altitude_min_m + shrink_margin * alt_span;
    const double zhi = region.altitude_max_m - shrink_margin * alt_span;
    const double rmax = region.radius_m * (1.0 - shrink_margin);
    std::vector<Vec3> pts;
    pts.reserve(count);
    while (static_cast<int>(pts.size()) < count) {
        const double x = (2.0 * rng.uniform() - 1.0) * rmax;
        const double y = (2.0 * rng.uniform() - 1.0) * rmax;
        const double z = zlo + rng.uniform() * (zhi - zlo);
        const Vec3 p(x, y, z);
        if (p.norm() <= rmax) pts.push_back(p);
    }
    return pts;
}

ReferenceTrajectory cubic_spline_trajectory(const std::vector<Vec3>& waypoints,
                                            double total_time_s, double dt_s) {
    const int n_slots = static_cast<int>(std::llround(total_time_s / dt_s));
    if (std::abs(n_slots * dt_s - total_time_s) > 1e-9 * total_time_s)
        throw DomainError("cubic_spline_trajectory: total_time must be a multiple of dt");
    std::vector<double> times(waypoints.size());
    for (std::size_t i = 0; i < waypoints.size(); ++i)
        times[i] = total_time_s * static_cast<double>(i) /
                   static_cast<double>(waypoints.size() - 1);
    const CubicSpline spline(times, waypoints);
    ReferenceTrajectory traj;
    traj.waypoints = waypoints;
    traj.dt_s = dt_s;
    traj.states.resize(n_slots);
    for (int n = 0; n < n_slots; ++n) {
        const double t = n * dt_s;
        traj.states[n] << spline.position(t), spline.velocity(t);
    }
    return traj;
}

ReferenceTrajectory generate_trajectory(Rng& rng, double mean_count,
                                        const CoverageRegion& region, double total_time_s,
                                        double dt_s, int max_attempts) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const auto wps = poisson_waypoints(rng, mean_count, region);
        ReferenceTrajectory traj;
        try {
            traj = cubic_spline_trajectory(wps, total_time_s, dt_s);
        } catch (const DomainError&) {
            continue;  // duplicate waypoints; redraw
        }
        bool inside = true;
        for (const auto& x : traj.states)
            if (!region.contains(x.head<3>())) {
                inside = false;
                break;
            }
        if (inside) return traj;
    }
    throw NonConvergenceError("generate_trajectory: could not keep spline inside region");
}

}  // namespace iscc
