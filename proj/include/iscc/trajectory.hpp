#pragma once

#include <vector>

#include "iscc/rng.hpp"
#include "iscc/types.hpp"

namespace iscc {

/// Hemispherical coverage shell the mission must stay inside.
struct CoverageRegion {
    double radius_m = 1000.0;
    double altitude_min_m = 100.0;  // exclusive
    double altitude_max_m = 300.0;  // inclusive

    bool contains(const Vec3& p) const {
        return p.norm() <= radius_m && p.z() > altitude_min_m && p.z() <= altitude_max_m;
    }
    double volume_m3() const;
};

/// Natural cubic spline through uniformly spaced knots, one per axis.
class CubicSpline {
public:
    CubicSpline(std::vector<double> knot_times, std::vector<Vec3> knots);

    Vec3 position(double t) const;
    Vec3 velocity(double t) const;
    Vec3 acceleration(double t) const;

private:
    int segment(double t) const;
    std::vector<double> t_;
    std::vector<Vec3> y_;
    std::vector<Vec3> m_;  // second derivatives at knots
};

/// Reference states sampled at the slot rate.
struct ReferenceTrajectory {
    std::vector<Vec3> waypoints;
    std::vector<Vec6> states;  // x_ref,n = [p_ref; v_ref]
    double dt_s = 0.1;

    const Vec3 position(int n) const { return states[n].head<3>(); }
    const Vec3 velocity(int n) const { return states[n].tail<3>(); }
    int num_slots() const { return static_cast<int>(states.size()); }
};

/// Homogeneous-Poisson waypoint draw inside the region; count clamped to >= 4
/// by redrawing. `mean_count` sets the process intensity times the volume.
std::vector<Vec3> poisson_waypoints(Rng& rng, double mean_count, const CoverageRegion& region,
                                    double shrink_margin = 0.02);

/// Spline through the waypoints with uniform knot timing over the mission.
ReferenceTrajectory cubic_spline_trajectory(const std::vector<Vec3>& waypoints,
                                            double total_time_s, double dt_s);

/// Draw waypoint sets until the sampled spline stays within the region.
ReferenceTrajectory generate_trajectory(Rng& rng, double mean_count,
                                        const CoverageRegion& region, double total_time_s,
                                        double dt_s, int max_attempts = 500);

}  // namespace iscc
