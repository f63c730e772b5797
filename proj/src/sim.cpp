#include "iscc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "iscc/linkbudget.hpp"
#include "iscc/specfun.hpp"

namespace iscc {

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::IsccClosedLoop: return "iscc";
        case Scheme::OpenLoop: return "open_loop";
        case Scheme::GnssClosedLoop: return "gnss";
        case Scheme::IsccIgnoreLoss: return "iscc_ignore_loss";
    }
    return "unknown";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "iscc") return Scheme::IsccClosedLoop;
    if (name == "open_loop" || name == "open") return Scheme::OpenLoop;
    if (name == "gnss") return Scheme::GnssClosedLoop;
    if (name == "iscc_ignore_loss" || name == "ignore") return Scheme::IsccIgnoreLoss;
    throw DomainError("unknown scheme '" + name + "'");
}

SimResult run_closed_loop(const Config& cfg, const ResourceFractions& fractions,
                          const ReferenceTrajectory& traj, std::uint64_t seed,
                          Scheme scheme) {
    const bool isac = scheme == Scheme::IsccClosedLoop || scheme == Scheme::IsccIgnoreLoss;
    const bool gnss = scheme == Scheme::GnssClosedLoop;
    const bool open_loop = scheme == Scheme::OpenLoop;
    const bool has_drops = isac;

    const SystemMatrices m = cfg.matrices();
    const ProcessNoise pn = cfg.process_noise();
    const LqgSynthesis lqg = synthesize_lqg(m, cfg.weights());
    const WaveformConfig wf = cfg.waveform();
    const ArrayConfig arr = cfg.array();
    const FblParams ctrl_fbl = cfg.ctrl_fbl();
    const int n_slots = traj.num_slots();

    Rng rng_process(seed, "process");
    Rng rng_obs(seed, "obs");
    Rng rng_drop(seed, "drop");
    Rng rng_fade(seed, "fade");
    Rng rng_shadow(seed, "shadow");

    // Offline drop rate for the design/trajectory modes and for rho logging.
    double eps_bar = 0.0;
    if (has_drops) {
        const double snr_off = cfg.ctrl_mode() == CtrlSnrMode::Design
                                   ? cfg.ctrl_design_snr_db
                                   : trajectory_avg_ctrl_snr_db(cfg, traj);
        eps_bar = avg_ctrl_drop_rate(cfg, fractions.alpha_ctrl, snr_off);
    }

    SimResult res;
    res.rho_m = spectral_radius(build_stability_matrix(m.a, m.b, lqg.k, eps_bar).m);
    res.err_m.reserve(n_slots);

    DroneState truth = DroneState::from_stacked(traj.states[0]);
    KalmanState kf;
    bool kf_ready = false;
    Vec3 u_applied = Vec3::Zero();
    std::vector<Vec6> xs;
    std::vector<Vec3> us;
    std::vector<Vec6> refs;
    xs.reserve(n_slots);
    double beam_theta = 0.0, beam_phi = 0.0;
    bool have_beam = false;

    for (int n = 0; n < n_slots; ++n) {
        const Vec6 x_ref = traj.states[n];
        const Geometry geom = geometry_from_drone(cfg, truth.position_m);

        // Diagnostic link draw (fading + shadow on the data budget).
        const cd g_fade = rician_gain(cfg.rician_k_db, rng_fade);
        const double shadow = rng_shadow.normal(
            0.0, shadow_sigma_db(truth.position_m.z(), cfg.shadow_sigma_a_db,
                                 cfg.shadow_decay_per_m));
        const double inst_data_snr_db = data_snr_db(cfg, geom.range_m) +
                                        linear_to_db(std::norm(g_fade)) - shadow;
        res.snr_db.push_back(inst_data_snr_db);

        Vec3 u_cmd = Vec3::Zero();
        if (open_loop) {
            const int n1 = std::min(n + 1, n_slots - 1);
            u_cmd = (traj.velocity(n1) - traj.velocity(n)) / m.dt_s;
        } else {
            if (isac) {
                if (!have_beam) {
                    beam_theta = geom.azimuth_rad;
                    beam_phi = geom.elevation_rad;
                    have_beam = true;
                }
                const SensingBounds bounds = sensing_bounds(
                    geom, arr, beam_theta, beam_phi, wf, fractions.alpha_sen,
                    sensing_gamma_s(cfg, geom.range_m), cfg.sensing_cond_threshold);
                const Observation obs = synthesize_observation(truth, geom, bounds, rng_obs);
                if (!kf_ready) {
                    kf.estimate << obs.y.head<3>(), Vec3::Zero();
                    kf.covariance.setZero();
                    kf.covariance.topLeftCorner<3, 3>() = bounds.crlb_position_m2;
                    kf.covariance.bottomRightCorner<3, 3>() = 10.0 * Mat3::Identity();
                    kf_ready = true;
                } else {
                    kalman_predict(kf, u_applied, m, pn);
                    kalman_update<4>(kf, obs.c, obs.y, obs.noise_cov);
                }
                // Steer next slot's beam at the newest estimated angles.
                const Vec3 rel = kf.estimate.head<3>() - cfg.gbs_position();
                const double r = rel.norm();
                if (r > 1.0) {
                    beam_theta = std::atan2(rel.y(), rel.x());
                    beam_phi = std::asin(std::clamp(rel.z() / r, -1.0, 1.0));
                }
            } else if (gnss && n % cfg.gnss_update_period_slots == 0) {
                Eigen::Matrix<double, 6, 6> c = Mat6::Identity();
                Mat6 r_cov = Mat6::Zero();
                r_cov.topLeftCorner<3, 3>() =
                    cfg.gnss_pos_sigma_m * cfg.gnss_pos_sigma_m * Mat3::Identity();
                r_cov.bottomRightCorner<3, 3>() =
                    cfg.gnss_vel_sigma_ms * cfg.gnss_vel_sigma_ms * Mat3::Identity();
                Vec6 y = truth.stacked();
                for (int i = 0; i < 3; ++i) y[i] += cfg.gnss_pos_sigma_m * rng_obs.normal();
                for (int i = 3; i < 6; ++i) y[i] += cfg.gnss_vel_sigma_ms * rng_obs.normal();
                if (!kf_ready) {
                    kf.estimate = y;
                    kf.covariance = r_cov;
                    kf_ready = true;
                } else {
                    kalman_predict(kf, u_applied, m, pn);
                    kalman_update<6>(kf, c, y, r_cov);
                }
            } else if (gnss && kf_ready) {
                kalman_predict(kf, u_applied, m, pn);
            }
            if (kf_ready) u_cmd = lqg_command(kf.estimate, x_ref, lqg.k);
        }

        // Command delivery.
        double eps_n = 0.0;
        int drop = 0;
        if (has_drops) {
            if (cfg.ctrl_mode() == CtrlSnrMode::Instantaneous) {
                const double snr_db_n = ctrl_snr_db_at_range(cfg, geom.range_m) +
                                        linear_to_db(std::norm(g_fade)) - shadow;
                eps_n = ctrl_drop_probability(fractions.alpha_ctrl, db_to_linear(snr_db_n),
                                              wf, ctrl_fbl);
            } else {
                eps_n = eps_bar;
            }
            drop = rng_drop.bernoulli(eps_n) ? 1 : 0;
        }
        u_applied = drop ? Vec3::Zero() : u_cmd;
        res.eps_ctrl_n.push_back(eps_n);
        res.dropped.push_back(drop);

        res.err_m.push_back((truth.position_m - traj.position(n)).norm());
        xs.push_back(truth.stacked());
        us.push_back(u_applied);
        refs.push_back(x_ref);

        truth = step(truth, u_applied, pn.draw(rng_process), m);
        res.slots_run = n + 1;
        const int n1 = std::min(n + 1, n_slots - 1);
        if ((truth.position_m - traj.position(n1)).norm() > cfg.divergence_threshold_m) {
            res.diverged = true;
            break;
        }
    }

    const EmpiricalCost cost = empirical_lqg_cost(xs, us, refs, cfg.weights());
    res.lqg_cost = cost.error_cost;
    res.lqg_cost_absolute = cost.absolute_cost;
    if (res.diverged) {
        res.mean_err_m = cfg.divergence_threshold_m;
        res.max_err_m = cfg.divergence_threshold_m;
    } else {
        res.mean_err_m = 0.0;
        for (double e : res.err_m) res.mean_err_m += e;
        res.mean_err_m /= std::max<std::size_t>(1, res.err_m.size());
        res.max_err_m = *std::max_element(res.err_m.begin(), res.err_m.end());
    }
    return res;
}

SimResult run_baseline(Scheme scheme, const Config& cfg, const ResourceFractions& fractions,
                       const ReferenceTrajectory& traj, std::uint64_t seed) {
    return run_closed_loop(cfg, fractions, traj, seed, scheme);
}

MonteCarloTable monte_carlo(const Config& cfg, const std::vector<Scheme>& schemes,
                            int n_runs, std::uint64_t base_seed, int jobs) {
    if (n_runs < 1) throw DomainError("monte_carlo: need at least one run");
    MonteCarloTable table;

    // Allocations are mission-level; with the design-point control budget the
    // optimum does not depend on the trajectory draw, so compute them once on
    // a reference trajectory.
    {
        Rng traj_rng(base_seed, "alloc-traj");
        const ReferenceTrajectory ref = generate_trajectory(
            traj_rng, cfg.waypoint_mean_count, cfg.region(), cfg.mission_duration_s,
            cfg.slot_s);
        const AllocationProblem with_loss(cfg, ref, false);
        table.iscc_fractions = sca_solve(with_loss).fractions;
        const AllocationProblem lossless(cfg, ref, true);
        table.ignore_loss_fractions = sca_solve(lossless).fractions;
    }

    std::vector<ReferenceTrajectory> trajs(n_runs);
    for (int r = 0; r < n_runs; ++r) {
        Rng traj_rng(base_seed, "traj", static_cast<std::uint64_t>(r));
        trajs[r] = generate_trajectory(traj_rng, cfg.waypoint_mean_count, cfg.region(),
                                       cfg.mission_duration_s, cfg.slot_s);
    }

    for (Scheme s : schemes) {
        SchemeAggregate agg;
        agg.scheme = s;
        agg.runs.resize(n_runs);
        const ResourceFractions frac =
            s == Scheme::IsccIgnoreLoss ? table.ignore_loss_fractions : table.iscc_fractions;
        auto worker = [&](int begin, int end) {
            for (int r = begin; r < end; ++r) {
                const std::uint64_t run_seed = base_seed ^ Rng::fnv1a("run") ^
                                               (0x9E3779B97F4A7C15ull * (r + 1));
                agg.runs[r] = run_closed_loop(cfg, frac, trajs[r], run_seed, s);
            }
        };
        const int workers = std::clamp(jobs, 1, n_runs);
        if (workers == 1) {
            worker(0, n_runs);
        } else {
            std::vector<std::thread> pool;
            const int chunk = (n_runs + workers - 1) / workers;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back(worker, w * chunk, std::min(n_runs, (w + 1) * chunk));
            for (auto& t : pool) t.join();
        }
        double sum = 0.0, sum2 = 0.0, cost = 0.0, div = 0.0;
        for (const auto& run : agg.runs) {
            sum += run.mean_err_m;
            sum2 += run.mean_err_m * run.mean_err_m;
            cost += run.lqg_cost;
            div += run.diverged ? 1.0 : 0.0;
        }
        agg.mean_err_m = sum / n_runs;
        agg.std_err_m =
            n_runs > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / n_runs) / (n_runs - 1)))
                       : 0.0;
        agg.mean_lqg_cost = cost / n_runs;
        agg.diverged_frac = div / n_runs;
        table.rows.push_back(std::move(agg));
    }
    return table;
}

}  // namespace iscc
