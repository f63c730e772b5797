#include "iscc/allocation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "iscc/estimation.hpp"
#include "iscc/sensing.hpp"
#include "iscc/specfun.hpp"

namespace iscc {

namespace {

double wall_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

AllocationProblem::AllocationProblem(const Config& cfg, const ReferenceTrajectory& traj,
                                     bool assume_lossless)
    : cfg_(cfg), lossless_(assume_lossless) {
    const WaveformConfig wf = cfg.waveform();
    const ArrayConfig arr = cfg.array();

    // Per-slot objective coefficients. With the FIM's alpha-scalings factored
    // out, Tr(CRLB_p) = c_tau / S2(n) + c_angle / n with n = alpha_sen * K,
    // where S2 is the centred subcarrier second moment.
    slot_c_tau_.reserve(traj.num_slots());
    slot_c_angle_.reserve(traj.num_slots());
    for (const auto& x : traj.states) {
        const Geometry g = geometry_from_drone(cfg, x.head<3>());
        const double gamma_s = sensing_gamma_s(cfg, g.range_m);
        const CVecX w = conjugate_beamformer(g.azimuth_rad, g.elevation_rad, arr);
        const SpatialSignature sig =
            spatial_signature(g.azimuth_rad, g.elevation_rad, arr, w);
        const double m = wf.num_symbols;
        const double wk = 2.0 * M_PI * wf.subcarrier_spacing_hz;
        // Unit FIM entries: delay at S2 = 1, angles at n = 1.
        const double jtt_u = 2.0 * gamma_s * sig.eta.squaredNorm() * wk * wk * m;
        Eigen::Matrix2d j2u;
        j2u << sig.d_theta.squaredNorm(), sig.d_theta.dot(sig.d_phi).real(),
            sig.d_theta.dot(sig.d_phi).real(), sig.d_phi.squaredNorm();
        j2u *= 2.0 * gamma_s * m;
        const double tau = 2.0 * g.range_m / kSpeedOfLight;
        const Mat3 jac = position_jacobian(tau, g.azimuth_rad, g.elevation_rad);
        const Mat3 utu = jac.transpose() * jac;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(j2u);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw InfeasibleError("AllocationProblem: angle FIM singular along trajectory");
        slot_c_tau_.push_back(utu(0, 0) / jtt_u);
        slot_c_angle_.push_back((j2u.inverse() * utu.bottomRightCorner<2, 2>()).trace());
    }

    ctrl_snr_db_ = offline_ctrl_snr_db(cfg, traj);
    const SystemMatrices m = cfg.matrices();
    const LqgSynthesis lqg = synthesize_lqg(m, cfg.weights());
    alpha_star_ = critical_alpha_ctrl(critical_eps(m.a, m.b, lqg.k), db_to_linear(ctrl_snr_db_),
                                      wf, cfg.ctrl_fbl());
    alpha_rho_ = alpha_for_rho(cfg.stability_rho_max, m.a, m.b, lqg.k,
                               db_to_linear(ctrl_snr_db_), wf, cfg.ctrl_fbl());

    // Rate-cost demand L(b) at the lossless reference (alpha_sen = 0.15 for
    // the steady filter covariance entering the equivalent noise).
    const ProcessNoise pn = cfg.process_noise();
    b_min_ = b_min_floor(lqg.p, pn.covariance());
    Vec6 mid = traj.states[traj.num_slots() / 2];
    const Geometry gmid = geometry_from_drone(cfg, mid.head<3>());
    const SensingBounds bounds =
        sensing_bounds(gmid, arr, gmid.azimuth_rad, gmid.elevation_rad, wf, 0.15,
                       sensing_gamma_s(cfg, gmid.range_m), cfg.sensing_cond_threshold);
    Eigen::Matrix4d r_bar = Eigen::Matrix4d::Zero();
    r_bar.topLeftCorner<3, 3>() = bounds.crlb_position_m2;
    r_bar(3, 3) = bounds.crlb_radial_velocity_m2s2;
    const Mat6 sigma_est = steady_estimation_covariance(
        m, pn, observation_matrix(gmid.los_unit), r_bar, cfg.riccati_tol);
    const Mat6 bk = m.b * lqg.k;
    const Mat6 sigma_tilde = pn.covariance() + bk * sigma_est * bk.transpose();
    const CoupledRiccati ds = coupled_riccati_ds(m, cfg.weights(), 0.0, cfg.riccati_tol);
    if (cfg.lqg_target_cost <= b_min_)
        throw InfeasibleError("AllocationProblem: lqg_target_cost below the cost floor " +
                              std::to_string(b_min_));
    l_demand_bits_ = rate_cost_l(cfg.lqg_target_cost, m.a, ds.d, sigma_tilde, b_min_);

    // Comm rate is linear in alpha_comm at the offline data SNR.
    comm_unit_rate_bps_ =
        fbl_rate(1.0, wf.total_bandwidth_hz(),
                 db_to_linear(ctrl_snr_db_ - cfg.ctrl_snr_margin_db), cfg.comm_blocklength,
                 cfg.comm_bler);
    const double min_rate = cfg.comm_min_rate_mbps * 1e6;
    if (comm_unit_rate_bps_ <= 0.0 || min_rate > comm_unit_rate_bps_ * cfg.alpha_max)
        throw InfeasibleError("AllocationProblem: comm-rate constraint unsatisfiable");
    alpha_comm_floor_ = std::max(cfg.alpha_min, min_rate / comm_unit_rate_bps_);

    if (sum_cap() < cfg.alpha_min + (lossless_ ? cfg.alpha_min : alpha_rho_))
        throw InfeasibleError("AllocationProblem: empty feasible set after comm floor");
}

double AllocationProblem::objective_f_sen(double alpha_sen) const {
    const double n = alpha_sen * cfg_.num_subcarriers;
    const double s2 = n * (n * n - 1.0) / 12.0;
    if (n <= 1.0 || s2 <= 0.0) return std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = 0; i < slot_c_tau_.size(); ++i)
        acc += slot_c_tau_[i] / s2 + slot_c_angle_[i] / n;
    return acc / static_cast<double>(slot_c_tau_.size());
}

double AllocationProblem::objective_gradient(double alpha_sen) const {
    const double k = cfg_.num_subcarriers;
    const double n = alpha_sen * k;
    const double s2 = n * (n * n - 1.0) / 12.0;
    const double ds2_dn = (3.0 * n * n - 1.0) / 12.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < slot_c_tau_.size(); ++i)
        acc += -slot_c_tau_[i] * ds2_dn / (s2 * s2) - slot_c_angle_[i] / (n * n);
    return acc * k / static_cast<double>(slot_c_tau_.size());
}

double AllocationProblem::ctrl_drop_rate(double alpha_ctrl) const {
    if (lossless_) return 0.0;
    return avg_ctrl_drop_rate(cfg_, alpha_ctrl, ctrl_snr_db_);
}

double AllocationProblem::effective_ctrl_throughput(double alpha_ctrl) const {
    const WaveformConfig wf = cfg_.waveform();
    const FblParams fbl = cfg_.ctrl_fbl();
    const double rate = fbl_rate(alpha_ctrl, wf.total_bandwidth_hz(),
                                 db_to_linear(ctrl_snr_db_), fbl.blocklength_symbols,
                                 fbl.target_bler);
    return (1.0 - ctrl_drop_rate(alpha_ctrl)) * rate * fbl.deadline_s;
}

double AllocationProblem::effective_ctrl_throughput_grad(double alpha_ctrl) const {
    const WaveformConfig wf = cfg_.waveform();
    const FblParams fbl = cfg_.ctrl_fbl();
    const double gamma = db_to_linear(ctrl_snr_db_);
    const double rate = fbl_rate(alpha_ctrl, wf.total_bandwidth_hz(), gamma,
                                 fbl.blocklength_symbols, fbl.target_bler);
    const double rate_grad = rate / std::max(alpha_ctrl, 1e-12);  // rate linear in alpha
    const double eps = ctrl_drop_rate(alpha_ctrl);
    const double eps_grad =
        lossless_ ? 0.0
                  : ctrl_drop_probability_dalpha(alpha_ctrl, gamma, wf, cfg_.ctrl_fbl());
    return ((1.0 - eps) * rate_grad - eps_grad * rate) * fbl.deadline_s;
}

bool AllocationProblem::feasible(double alpha_sen, double alpha_ctrl,
                                 std::map<std::string, double>* report, double tol) const {
    std::map<std::string, double> slacks;
    slacks["alpha_sen_min"] = alpha_sen - cfg_.alpha_min;
    slacks["alpha_ctrl_min"] = alpha_ctrl - cfg_.alpha_min;
    slacks["alpha_max"] =
        std::min(cfg_.alpha_max - alpha_sen, cfg_.alpha_max - alpha_ctrl);
    slacks["comm_rate"] = sum_cap() - alpha_sen - alpha_ctrl;
    slacks["rate_cost"] = effective_ctrl_throughput(alpha_ctrl) - l_demand_bits_;
    if (!lossless_) {
        slacks["stability"] = alpha_ctrl - alpha_star_;
        slacks["stability_margin"] = alpha_ctrl - alpha_rho_;
    }
    if (report) *report = slacks;
    for (const auto& [name, slack] : slacks)
        if (slack < -tol) return false;
    return true;
}

namespace {

// Projection onto {boxes} ∩ {x + y <= cap} ∩ {y >= y_floor}.
std::pair<double, double> project(double x, double y, double lo, double hi, double cap,
                                  double y_floor) {
    y = std::clamp(y, std::max(lo, y_floor), hi);
    x = std::clamp(x, lo, hi);
    if (x + y > cap) {
        const double t = 0.5 * (x + y - cap);
        x -= t;
        y -= t;
        // Re-clamp and push the residual to the free coordinate.
        const double ylo = std::max(lo, y_floor);
        if (y < ylo) {
            y = ylo;
            x = std::min(x, cap - y);
        }
        if (x < lo) {
            x = lo;
            y = std::min(y, cap - x);
        }
        x = std::clamp(x, lo, std::min(hi, cap - std::max(lo, y_floor)));
        y = std::clamp(y, ylo, std::min(hi, cap - x));
    }
    return {x, y};
}

}  // namespace

AllocationResult sca_solve(const AllocationProblem& p) {
    return sca_solve(p, 0.15, std::max(2.0 * p.alpha_ctrl_star(), 0.08));
}

AllocationResult sca_solve(const AllocationProblem& p, double init_alpha_sen,
                           double init_alpha_ctrl) {
    const Config& cfg = p.config();
    const double t0 = wall_seconds();
    const double lo = cfg.alpha_min, hi = cfg.alpha_max, cap = p.sum_cap();
    const double hard_floor =
        p.lossless_design() ? lo : std::max({lo, p.alpha_ctrl_rho_floor(),
                                             p.alpha_ctrl_star() + 1e-9});

    auto [as, ac] = project(init_alpha_sen, init_alpha_ctrl, lo, hi, cap, hard_floor);
    std::map<std::string, double> rep;
    if (!p.feasible(as, ac, &rep, 1e-7)) {
        for (const auto& [name, slack] : rep)
            if (slack < -1e-7)
                throw InfeasibleError("sca_solve: initial point violates '" + name + "'");
    }

    AllocationResult out;
    out.trace.push_back({0.0, as, ac});
    const double rho = cfg.sca_prox_weight;
    int k = 0;
    for (; k < cfg.sca_max_iters; ++k) {
        // Linearise the effective-throughput constraint at the iterate.
        const double g0 = p.effective_ctrl_throughput(ac);
        const double g1 = p.effective_ctrl_throughput_grad(ac);
        double g_floor = hard_floor;
        if (g0 < p.rate_demand_bits() || g1 > 0.0) {
            if (g1 > 1e-12)
                g_floor = std::max(g_floor, ac + (p.rate_demand_bits() - g0) / g1);
            else if (g0 < p.rate_demand_bits())
                throw InfeasibleError("sca_solve: throughput constraint has no ascent");
        }
        // Convex sub-problem: projected gradient with backtracking.
        double xs = as, xc = ac;
        double step = 0.25;
        auto sub_obj = [&](double s, double c) {
            return p.objective_f_sen(s) + rho * ((s - as) * (s - as) + (c - ac) * (c - ac));
        };
        for (int inner = 0; inner < 4000; ++inner) {
            const double gs = p.objective_gradient(xs) + 2.0 * rho * (xs - as);
            const double gc = 2.0 * rho * (xc - ac);
            double ts = step;
            double f0 = sub_obj(xs, xc);
            double ns, nc;
            for (;;) {
                auto pr = project(xs - ts * gs, xc - ts * gc, lo, hi, cap, g_floor);
                ns = pr.first;
                nc = pr.second;
                if (sub_obj(ns, nc) <= f0 + 1e-18 || ts < 1e-14) break;
                ts *= 0.5;
            }
            const double move = std::hypot(ns - xs, nc - xc);
            xs = ns;
            xc = nc;
            if (move < 1e-9) break;
        }
        const double delta2 = (xs - as) * (xs - as) + (xc - ac) * (xc - ac);
        as = xs;
        ac = xc;
        out.trace.push_back({static_cast<double>(k + 1), as, ac});
        if (delta2 <= cfg.sca_tol) {
            out.converged = true;
            ++k;
            break;
        }
    }
    out.iterations = k;
    out.fractions = ResourceFractions::from_sen_ctrl(as, ac);
    out.objective_m2 = p.objective_f_sen(as);
    p.feasible(as, ac, &out.feasibility, 1e-7);
    out.wall_time_s = wall_seconds() - t0;
    return out;
}

AllocationResult grid_search(const AllocationProblem& p, double step) {
    if (!(step > 0.0 && step <= 0.1)) throw DomainError("grid_search: step in (0, 0.1]");
    const Config& cfg = p.config();
    const double t0 = wall_seconds();
    AllocationResult out;
    double best = std::numeric_limits<double>::infinity();
    int evals = 0;
    for (double ac = cfg.alpha_min; ac <= cfg.alpha_max + 1e-12; ac += step) {
        for (double as = cfg.alpha_min; as <= cfg.alpha_max + 1e-12; as += step) {
            if (!p.feasible(as, ac)) continue;
            const double f = p.objective_f_sen(as);
            ++evals;
            if (f < best) {
                best = f;
                out.fractions = ResourceFractions::from_sen_ctrl(as, ac);
            }
        }
    }
    if (!std::isfinite(best)) throw InfeasibleError("grid_search: feasible set is empty");
    out.objective_m2 = best;
    out.iterations = evals;
    out.converged = true;
    p.feasible(out.fractions.alpha_sen, out.fractions.alpha_ctrl, &out.feasibility);
    out.wall_time_s = wall_seconds() - t0;
    return out;
}

AllocationResult ga_search(const AllocationProblem& p, Rng& rng) {
    const Config& cfg = p.config();
    const double t0 = wall_seconds();
    const double lo = cfg.alpha_min, hi = cfg.alpha_max, cap = p.sum_cap();
    // Project onto the closed convex hull of the feasible set; the throughput
    // and stability constraints reduce to an alpha_ctrl floor.
    double floor_c = lo;
    if (!p.lossless_design())
        floor_c = std::max({lo, p.alpha_ctrl_rho_floor(), p.alpha_ctrl_star() + 1e-9});
    {
        double glo = floor_c, ghi = hi;
        if (p.effective_ctrl_throughput(ghi) < p.rate_demand_bits())
            throw InfeasibleError("ga_search: rate demand unreachable");
        if (p.effective_ctrl_throughput(glo) < p.rate_demand_bits()) {
            while (ghi - glo > 1e-10) {
                const double mid = 0.5 * (glo + ghi);
                (p.effective_ctrl_throughput(mid) < p.rate_demand_bits() ? glo : ghi) = mid;
            }
            floor_c = ghi;
        }
    }
    auto repair = [&](std::pair<double, double> q) {
        return project(q.first, q.second, lo, hi, cap, floor_c);
    };

    struct Indiv {
        double s, c, f;
    };
    auto fitness = [&](double s, double c) { return p.objective_f_sen(s); };
    std::vector<Indiv> pop(cfg.ga_population);
    for (auto& ind : pop) {
        auto q = repair({lo + rng.uniform() * (hi - lo), lo + rng.uniform() * (hi - lo)});
        ind = {q.first, q.second, fitness(q.first, q.second)};
    }
    auto best_of = [&]() {
        return *std::min_element(pop.begin(), pop.end(),
                                 [](const Indiv& a, const Indiv& b) { return a.f < b.f; });
    };
    Indiv best = best_of();
    for (int gen = 0; gen < cfg.ga_generations; ++gen) {
        std::vector<Indiv> next;
        next.reserve(pop.size());
        next.push_back(best);  // elitism
        auto tournament = [&]() -> const Indiv& {
            int w = static_cast<int>(rng.uniform() * pop.size());
            for (int i = 1; i < cfg.ga_tournament; ++i) {
                const int j = static_cast<int>(rng.uniform() * pop.size());
                if (pop[j].f < pop[w].f) w = j;
            }
            return pop[w];
        };
        while (next.size() < pop.size()) {
            const Indiv& a = tournament();
            const Indiv& b = tournament();
            // Blend crossover with per-gene extrapolation.
            auto blend = [&](double x, double y) {
                const double u = -0.25 + 1.5 * rng.uniform();
                return x + u * (y - x);
            };
            double s = blend(a.s, b.s) + cfg.ga_mutation_sigma * rng.normal();
            double c = blend(a.c, b.c) + cfg.ga_mutation_sigma * rng.normal();
            auto q = repair({s, c});
            next.push_back({q.first, q.second, fitness(q.first, q.second)});
        }
        pop = std::move(next);
        const Indiv gen_best = best_of();
        if (gen_best.f < best.f) best = gen_best;
    }
    AllocationResult out;
    out.fractions = ResourceFractions::from_sen_ctrl(best.s, best.c);
    out.objective_m2 = best.f;
    out.iterations = cfg.ga_generations;
    out.converged = true;
    p.feasible(best.s, best.c, &out.feasibility);
    out.wall_time_s = wall_seconds() - t0;
    return out;
}

}  // namespace iscc
