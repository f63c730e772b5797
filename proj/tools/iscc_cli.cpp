// Command-line reproduction harness: sweeps, allocation, closed-loop
// simulation, and scripted experiment bundles, all seeded and manifested.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "iscc/allocation.hpp"
#include "iscc/linkbudget.hpp"
#include "iscc/output.hpp"
#include "iscc/sim.hpp"

namespace fs = std::filesystem;
using namespace iscc;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int jobs = 1;
};

Config load_or_default(const GlobalOpts& g) {
    if (g.config_path.empty()) {
        Config c;
        c.validate();
        return c;
    }
    return load_config(g.config_path);
}

ReferenceTrajectory make_trajectory(const Config& cfg, std::uint64_t seed,
                                    std::uint64_t index = 0) {
    Rng rng(seed, "traj", index);
    return generate_trajectory(rng, cfg.waypoint_mean_count, cfg.region(),
                               cfg.mission_duration_s, cfg.slot_s);
}

void finish(const GlobalOpts& g, const Config& cfg, const std::string& sub,
            const std::vector<std::string>& outputs) {
    RunManifest man;
    man.config_hash = config_hash(cfg);
    man.seed = g.seed;
    man.tool_version = kToolVersion;
    man.subcommand = sub;
    man.outputs = outputs;
    man.write(g.out_dir);
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

int cmd_crlb_sweep(const GlobalOpts& g, const std::string& snr_list,
                   const std::string& alpha_list) {
    Config cfg = load_or_default(g);
    const auto traj = make_trajectory(cfg, g.seed);
    const ArrayConfig arr = cfg.array();
    const WaveformConfig wf = cfg.waveform();
    CsvWriter csv(fs::path(g.out_dir) / "crlb_sweep.csv",
                  {"alpha_sen", "snr_db", "peb_m", "veb_ms"});
    for (double snr_db : parse_list(snr_list)) {
        for (double alpha : parse_list(alpha_list)) {
            double peb = 0.0, veb = 0.0;
            int used = 0;
            for (int n = 0; n < traj.num_slots(); n += 10) {
                const Geometry geom = geometry_from_drone(cfg, traj.position(n));
                const SensingBounds b =
                    sensing_bounds(geom, arr, geom.azimuth_rad, geom.elevation_rad, wf,
                                   alpha, db_to_linear(snr_db), cfg.sensing_cond_threshold);
                peb += b.peb_m();
                veb += b.veb_ms();
                ++used;
            }
            csv.row({alpha, snr_db, peb / used, veb / used});
        }
    }
    finish(g, cfg, "crlb-sweep", {csv.path().string()});
    return 0;
}

int cmd_stability_sweep(const GlobalOpts& g) {
    Config cfg = load_or_default(g);
    const SystemMatrices m = cfg.matrices();
    const LqgSynthesis lqg = synthesize_lqg(m, cfg.weights());
    const auto traj = make_trajectory(cfg, g.seed);
    const double snr_db = offline_ctrl_snr_db(cfg, traj);

    CsvWriter eps_csv(fs::path(g.out_dir) / "stability_eps.csv", {"eps_ctrl", "rho_M"});
    for (double e = 0.0; e <= 1.0 + 1e-12; e += 0.005) {
        const auto sm = build_stability_matrix(m.a, m.b, lqg.k, std::min(e, 1.0));
        eps_csv.row({std::min(e, 1.0), spectral_radius(sm.m)});
    }
    CsvWriter a_csv(fs::path(g.out_dir) / "stability_alpha.csv",
                    {"alpha_ctrl", "eps_ctrl", "rho_M"});
    for (double a = 0.005; a <= 0.30 + 1e-12; a += 0.0025) {
        const double eps = avg_ctrl_drop_rate(cfg, a, snr_db);
        const auto sm = build_stability_matrix(m.a, m.b, lqg.k, eps);
        a_csv.row({a, eps, spectral_radius(sm.m)});
    }
    const double eps_star = critical_eps(m.a, m.b, lqg.k);
    const double alpha_star =
        critical_alpha_ctrl(eps_star, db_to_linear(snr_db), cfg.waveform(), cfg.ctrl_fbl());
    std::cout << "trajectory_avg_ctrl_snr_db=" << snr_db << " eps_star=" << eps_star
              << " alpha_ctrl_star=" << alpha_star << "\n";
    finish(g, cfg, "stability-sweep", {eps_csv.path().string(), a_csv.path().string()});
    return 0;
}

int cmd_trajectory(const GlobalOpts& g) {
    Config cfg = load_or_default(g);
    const auto traj = make_trajectory(cfg, g.seed);
    CsvWriter csv(fs::path(g.out_dir) / "trajectory.csv",
                  {"t", "px", "py", "pz", "vx", "vy", "vz"});
    for (int n = 0; n < traj.num_slots(); ++n) {
        const Vec3 p = traj.position(n), v = traj.velocity(n);
        csv.row({n * traj.dt_s, p.x(), p.y(), p.z(), v.x(), v.y(), v.z()});
    }
    finish(g, cfg, "trajectory", {csv.path().string()});
    return 0;
}

nlohmann::json result_json(const AllocationResult& r, const std::string& method) {
    nlohmann::json j;
    j["method"] = method;
    j["fractions"] = {{"alpha_sen", r.fractions.alpha_sen},
                      {"alpha_ctrl", r.fractions.alpha_ctrl},
                      {"alpha_comm", r.fractions.alpha_comm}};
    j["objective_m2"] = r.objective_m2;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["wall_time_s"] = r.wall_time_s;
    j["feasibility"] = r.feasibility;
    return j;
}

int cmd_allocate(const GlobalOpts& g, const std::string& method, double grid_step,
                 bool lossless) {
    Config cfg = load_or_default(g);
    const auto traj = make_trajectory(cfg, g.seed);
    const AllocationProblem problem(cfg, traj, lossless);
    AllocationResult r;
    if (method == "sca") {
        r = sca_solve(problem);
    } else if (method == "grid") {
        r = grid_search(problem, grid_step);
    } else if (method == "ga") {
        Rng rng(g.seed, "ga");
        r = ga_search(problem, rng);
    } else {
        std::cerr << "unknown method '" << method << "'\n";
        return 64;
    }
    const nlohmann::json j = result_json(r, method);
    std::cout << j.dump(2) << "\n";
    fs::create_directories(g.out_dir);
    const fs::path jpath = fs::path(g.out_dir) / ("allocation_" + method + ".json");
    std::ofstream(jpath, std::ios::binary) << j.dump(2) << "\n";
    std::vector<std::string> outputs{jpath.string()};
    if (method == "sca") {
        CsvWriter trace(fs::path(g.out_dir) / "sca_trace.csv",
                        {"iter", "alpha_sen", "alpha_ctrl"});
        for (const auto& t : r.trace) trace.row({t[0], t[1], t[2]});
        outputs.push_back(trace.path().string());
    }
    finish(g, cfg, "allocate", outputs);
    return 0;
}

std::vector<Scheme> schemes_from_flag(const std::string& s) {
    if (s == "all")
        return {Scheme::IsccClosedLoop, Scheme::GnssClosedLoop, Scheme::OpenLoop,
                Scheme::IsccIgnoreLoss};
    return {scheme_from_name(s)};
}

int cmd_simulate(const GlobalOpts& g, const std::string& scheme_flag, int runs,
                 bool trace_all) {
    Config cfg = load_or_default(g);
    const auto schemes = schemes_from_flag(scheme_flag);
    const MonteCarloTable table = monte_carlo(cfg, schemes, runs, g.seed, g.jobs);
    std::vector<std::string> outputs;
    CsvWriter agg(fs::path(g.out_dir) / "aggregate.csv",
                  {"scheme", "mean_err_m", "std_err_m", "lqg_cost", "diverged_frac"});
    for (const auto& row : table.rows) {
        agg.row_mixed({scheme_name(row.scheme), CsvWriter::format(row.mean_err_m),
                       CsvWriter::format(row.std_err_m),
                       CsvWriter::format(row.mean_lqg_cost),
                       CsvWriter::format(row.diverged_frac)});
        const int dump_runs = trace_all ? static_cast<int>(row.runs.size()) : 1;
        for (int r = 0; r < dump_runs; ++r) {
            CsvWriter ts(fs::path(g.out_dir) /
                             ("timeseries_" + scheme_name(row.scheme) + "_run" +
                              std::to_string(r) + ".csv"),
                         {"n", "t", "err_m", "dropped", "eps_ctrl_n", "snr_db"});
            const SimResult& run = row.runs[r];
            for (int n = 0; n < run.slots_run; ++n)
                ts.row({static_cast<double>(n), n * cfg.slot_s, run.err_m[n],
                        static_cast<double>(run.dropped[n]), run.eps_ctrl_n[n],
                        run.snr_db[n]});
            outputs.push_back(ts.path().string());
        }
    }
    outputs.push_back(agg.path().string());
    std::cout << "allocation iscc: alpha_sen=" << table.iscc_fractions.alpha_sen
              << " alpha_ctrl=" << table.iscc_fractions.alpha_ctrl
              << " alpha_comm=" << table.iscc_fractions.alpha_comm << "\n";
    for (const auto& row : table.rows)
        std::cout << scheme_name(row.scheme) << ": mean_err=" << row.mean_err_m
                  << " m, lqg_cost=" << row.mean_lqg_cost
                  << ", diverged_frac=" << row.diverged_frac << "\n";
    finish(g, cfg, "simulate", outputs);
    return 0;
}

int cmd_reproduce(const GlobalOpts& g, const std::string& figure) {
    Config cfg = load_or_default(g);
    GlobalOpts sub = g;
    sub.out_dir = (fs::path(g.out_dir) / ("figure_" + figure)).string();
    if (figure == "3") return cmd_stability_sweep(sub);
    if (figure == "4") return cmd_crlb_sweep(sub, "15,20,25,30",
                                             "0.02,0.04,0.06,0.1,0.15,0.2,0.3,0.4");
    if (figure == "5" || figure == "6" || figure == "7") {
        // LQG-cost / tracking-error surfaces over the allocation grid, and the
        // error-vs-PEB regression data.
        const auto traj = make_trajectory(cfg, g.seed);
        CsvWriter csv(fs::path(sub.out_dir) / "cost_error_surface.csv",
                      {"alpha_sen", "alpha_ctrl", "mean_err_m", "lqg_cost", "peb_m",
                       "comm_rate_mbps"});
        const AllocationProblem problem(cfg, traj);
        for (double ac : {0.05, 0.06, 0.07, 0.08, 0.09, 0.10}) {
            for (double as : {0.01, 0.02, 0.04, 0.07, 0.10, 0.15, 0.20, 0.25, 0.30}) {
                double err = 0.0, cost = 0.0;
                const int seeds = 3;
                for (int s = 0; s < seeds; ++s) {
                    const SimResult r =
                        run_closed_loop(cfg, ResourceFractions::from_sen_ctrl(as, ac), traj,
                                        g.seed + 1000 + s);
                    err += r.mean_err_m;
                    cost += r.lqg_cost;
                }
                const double peb = std::sqrt(problem.objective_f_sen(as));
                const double rate =
                    (1.0 - as - ac) * problem.comm_unit_rate_bps() / 1e6;
                csv.row({as, ac, err / seeds, cost / seeds, peb, rate});
            }
        }
        finish(sub, cfg, "reproduce-figure" + figure, {csv.path().string()});
        return 0;
    }
    if (figure == "8") return cmd_simulate(sub, "all", 20, false);
    if (figure == "table2") {
        const auto traj = make_trajectory(cfg, g.seed);
        const AllocationProblem problem(cfg, traj);
        nlohmann::json out;
        for (const std::string method : {"sca", "grid", "ga"}) {
            AllocationResult r;
            if (method == "sca") r = sca_solve(problem);
            else if (method == "grid") r = grid_search(problem, 0.01);
            else {
                Rng rng(g.seed, "ga");
                r = ga_search(problem, rng);
            }
            const SimResult sim = run_closed_loop(cfg, r.fractions, traj, g.seed + 7);
            nlohmann::json j = result_json(r, method);
            j["tracking_error_m"] = sim.mean_err_m;
            j["lqg_cost"] = sim.lqg_cost;
            j["peb_m"] = std::sqrt(r.objective_m2);
            j["comm_rate_mbps"] =
                r.fractions.alpha_comm * problem.comm_unit_rate_bps() / 1e6;
            out[method] = j;
        }
        fs::create_directories(sub.out_dir);
        const fs::path jpath = fs::path(sub.out_dir) / "table2.json";
        std::ofstream(jpath, std::ios::binary) << out.dump(2) << "\n";
        std::cout << out.dump(2) << "\n";
        finish(sub, cfg, "reproduce-table2", {jpath.string()});
        return 0;
    }
    std::cerr << "unknown figure '" << figure << "'\n";
    return 64;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Closed-loop sensing-communication-control drone tracking simulator"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--config", g.config_path, "path to a key=value config file");
    app.add_option("--seed", g.seed, "base seed for all randomness");
    app.add_option("--out-dir", g.out_dir, "output directory");
    app.add_option("--jobs", g.jobs, "worker threads for Monte-Carlo fan-out");

    auto* crlb = app.add_subcommand("crlb-sweep", "average PEB/VEB vs sensing fraction");
    std::string snr_list = "15,20,25,30";
    std::string alpha_list = "0.02,0.05,0.1,0.15,0.2,0.25,0.3,0.4";
    crlb->add_option("--snr-list", snr_list, "sensing SNR grid in dB");
    crlb->add_option("--alpha-list", alpha_list, "sensing fraction grid");

    auto* stab = app.add_subcommand("stability-sweep", "rho(M) and drop-rate sweeps");
    auto* traj = app.add_subcommand("trajectory", "dump a reference trajectory");

    auto* alloc = app.add_subcommand("allocate", "solve the resource allocation");
    std::string method = "sca";
    double grid_step = 0.01;
    bool lossless = false;
    alloc->add_option("--method", method, "sca|grid|ga");
    alloc->add_option("--grid-step", grid_step, "grid resolution");
    alloc->add_flag("--assume-lossless", lossless, "design with eps_ctrl forced to zero");

    auto* sim = app.add_subcommand("simulate", "closed-loop Monte-Carlo runs");
    std::string scheme = "iscc";
    int runs = 20;
    bool trace_all = false;
    sim->add_option("--scheme", scheme, "iscc|gnss|open|ignore|all");
    sim->add_option("--runs", runs, "number of Monte-Carlo runs");
    sim->add_flag("--trace-all", trace_all, "dump a time series for every run");

    auto* comp = app.add_subcommand("compare", "all schemes, aggregate table");
    int comp_runs = 20;
    comp->add_option("--runs", comp_runs, "number of Monte-Carlo runs");

    auto* repro = app.add_subcommand("reproduce", "scripted experiment bundles");
    std::string figure = "3";
    repro->add_option("--figure", figure, "3|4|5|6|7|8|table2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 64;
    }

    try {
        if (crlb->parsed()) return cmd_crlb_sweep(g, snr_list, alpha_list);
        if (stab->parsed()) return cmd_stability_sweep(g);
        if (traj->parsed()) return cmd_trajectory(g);
        if (alloc->parsed()) return cmd_allocate(g, method, grid_step, lossless);
        if (sim->parsed()) return cmd_simulate(g, scheme, runs, trace_all);
        if (comp->parsed()) return cmd_simulate(g, "all", comp_runs, false);
        if (repro->parsed()) return cmd_reproduce(g, figure);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 64;
}
