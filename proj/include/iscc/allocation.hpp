#pragma once

#include <map>
#include <vector>

#include "iscc/config.hpp"
#include "iscc/linkbudget.hpp"
#include "iscc/stability.hpp"

namespace iscc {

/// Decision variables on the unit simplex.
struct ResourceFractions {
    double alpha_sen = 0.0;
    double alpha_ctrl = 0.0;
    double alpha_comm = 0.0;

    static ResourceFractions from_sen_ctrl(double s, double c) { return {s, c, 1.0 - s - c}; }
};

/// Joint allocation problem over (alpha_sen, alpha_ctrl); alpha_comm is
/// eliminated through the simplex constraint.
class AllocationProblem {
public:
    /// `assume_lossless` builds the problem with eps_ctrl forced to zero
    /// (the loss-ignoring design); drops are still real in simulation.
    AllocationProblem(const Config& cfg, const ReferenceTrajectory& traj,
                      bool assume_lossless = false);

    /// Trajectory-averaged Tr(CRLB_p) in m^2.
    double objective_f_sen(double alpha_sen) const;
    double objective_gradient(double alpha_sen) const;

    /// Effective control throughput in deliverable bits per slot,
    /// g = (1 - eps(alpha)) R_ctrl(alpha) T_deadline, and its derivative.
    double effective_ctrl_throughput(double alpha_ctrl) const;
    double effective_ctrl_throughput_grad(double alpha_ctrl) const;

    double ctrl_drop_rate(double alpha_ctrl) const;

    /// Constraint aggregates.
    double alpha_ctrl_star() const { return alpha_star_; }
    double alpha_ctrl_rho_floor() const { return alpha_rho_; }
    double rate_demand_bits() const { return l_demand_bits_; }
    double comm_alpha_floor() const { return alpha_comm_floor_; }
    double sum_cap() const { return 1.0 - alpha_comm_floor_; }
    double ctrl_snr_db() const { return ctrl_snr_db_; }
    double comm_unit_rate_bps() const { return comm_unit_rate_bps_; }
    double b_min() const { return b_min_; }
    bool lossless_design() const { return lossless_; }

    /// True when (alpha_sen, alpha_ctrl) satisfies every constraint with the
    /// given slack tolerance; fills `report` with per-constraint margins.
    bool feasible(double alpha_sen, double alpha_ctrl,
                  std::map<std::string, double>* report = nullptr,
                  double tol = 1e-9) const;

    const Config& config() const { return cfg_; }

private:
    Config cfg_;
    std::vector<double> slot_c_tau_;    // per-slot delay-part coefficient
    std::vector<double> slot_c_angle_;  // per-slot angle-part coefficient
    double ctrl_snr_db_ = 0.0;
    double alpha_star_ = 0.0;
    double alpha_rho_ = 0.0;
    double l_demand_bits_ = 0.0;
    double alpha_comm_floor_ = 0.0;
    double comm_unit_rate_bps_ = 0.0;
    double b_min_ = 0.0;
    bool lossless_ = false;
};

struct AllocationResult {
    ResourceFractions fractions;
    double objective_m2 = 0.0;
    int iterations = 0;
    bool converged = false;
    double wall_time_s = 0.0;
    std::map<std::string, double> feasibility;  // constraint -> slack (>=0 ok)
    std::vector<std::array<double, 3>> trace;   // iter, alpha_sen, alpha_ctrl
};

/// Successive convex approximation (proximal, linearised throughput).
AllocationResult sca_solve(const AllocationProblem& p, double init_alpha_sen,
                           double init_alpha_ctrl);
AllocationResult sca_solve(const AllocationProblem& p);

/// Exhaustive scan of the feasible simplex at the given resolution.
AllocationResult grid_search(const AllocationProblem& p, double step);

/// Elitist genetic search with projection onto the feasible set.
AllocationResult ga_search(const AllocationProblem& p, Rng& rng);

}  // namespace iscc
