#pragma once

#include <string>
#include <vector>

#include "iscc/allocation.hpp"
#include "iscc/estimation.hpp"

namespace iscc {

enum class Scheme { IsccClosedLoop, OpenLoop, GnssClosedLoop, IsccIgnoreLoss };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// One closed-loop run's record.
struct SimResult {
    std::vector<double> err_m;        // ||p_n - p_ref,n|| per slot
    std::vector<int> dropped;         // 1 when the command was lost
    std::vector<double> eps_ctrl_n;   // per-slot drop probability
    std::vector<double> snr_db;       // per-slot data-link SNR (diagnostic)
    double mean_err_m = 0.0;
    double max_err_m = 0.0;
    double lqg_cost = 0.0;            // error-coordinate reading
    double lqg_cost_absolute = 0.0;   // literal x^T Q x reading
    double rho_m = 0.0;               // spectral radius at the run's avg drop rate
    bool diverged = false;
    int slots_run = 0;
};

/// Execute one scheme for one trajectory. `fractions` is ignored by the
/// open-loop and GNSS baselines.
SimResult run_closed_loop(const Config& cfg, const ResourceFractions& fractions,
                          const ReferenceTrajectory& traj, std::uint64_t seed,
                          Scheme scheme = Scheme::IsccClosedLoop);

SimResult run_baseline(Scheme scheme, const Config& cfg, const ResourceFractions& fractions,
                       const ReferenceTrajectory& traj, std::uint64_t seed);

/// Aggregate over seeded runs with common random numbers across schemes.
struct SchemeAggregate {
    Scheme scheme;
    double mean_err_m = 0.0;   // mean over runs of per-run mean error
    double std_err_m = 0.0;
    double mean_lqg_cost = 0.0;
    double diverged_frac = 0.0;
    std::vector<SimResult> runs;
};

struct MonteCarloTable {
    std::vector<SchemeAggregate> rows;
    ResourceFractions iscc_fractions;
    ResourceFractions ignore_loss_fractions;
};

MonteCarloTable monte_carlo(const Config& cfg, const std::vector<Scheme>& schemes,
                            int n_runs, std::uint64_t base_seed, int jobs = 1);

}  // namespace iscc
