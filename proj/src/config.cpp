#include "iscc/config.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>
#include <vector>

namespace iscc {

namespace {

struct Field {
    const char* key;
    std::variant<double Config::*, int Config::*, std::string Config::*> member;
};

const std::vector<Field>& registry() {
    static const std::vector<Field> fields = {
        {"carrier_frequency_ghz", &Config::carrier_frequency_ghz},
        {"bandwidth_mhz", &Config::bandwidth_mhz},
        {"subcarrier_spacing_khz", &Config::subcarrier_spacing_khz},
        {"num_subcarriers", &Config::num_subcarriers},
        {"num_symbols", &Config::num_symbols},
        {"cp_duration_us", &Config::cp_duration_us},
        {"tx_power_dbm", &Config::tx_power_dbm},
        {"noise_psd_dbm_hz", &Config::noise_psd_dbm_hz},
        {"gbs_height_m", &Config::gbs_height_m},
        {"array_nx", &Config::array_nx},
        {"array_ny", &Config::array_ny},
        {"array_spacing_wavelengths", &Config::array_spacing_wavelengths},
        {"coverage_radius_m", &Config::coverage_radius_m},
        {"altitude_min_m", &Config::altitude_min_m},
        {"altitude_max_m", &Config::altitude_max_m},
        {"shadow_sigma_a_db", &Config::shadow_sigma_a_db},
        {"shadow_decay_per_m", &Config::shadow_decay_per_m},
        {"rcs_m2", &Config::rcs_m2},
        {"rician_k_db", &Config::rician_k_db},
        {"sensing_snr_mode", &Config::sensing_snr_mode},
        {"sensing_snr_db", &Config::sensing_snr_db},
        {"sensing_noise_bw", &Config::sensing_noise_bw},
        {"sensing_cond_threshold", &Config::sensing_cond_threshold},
        {"ctrl_snr_mode", &Config::ctrl_snr_mode},
        {"ctrl_design_snr_db", &Config::ctrl_design_snr_db},
        {"ctrl_snr_margin_db", &Config::ctrl_snr_margin_db},
        {"ctrl_deadline", &Config::ctrl_deadline},
        {"ctrl_payload_bits", &Config::ctrl_payload_bits},
        {"ctrl_blocklength", &Config::ctrl_blocklength},
        {"ctrl_bler", &Config::ctrl_bler},
        {"comm_blocklength", &Config::comm_blocklength},
        {"comm_bler", &Config::comm_bler},
        {"comm_min_rate_mbps", &Config::comm_min_rate_mbps},
        {"mission_duration_s", &Config::mission_duration_s},
        {"slot_s", &Config::slot_s},
        {"process_noise_pos_m2", &Config::process_noise_pos_m2},
        {"process_noise_vel_m2s2", &Config::process_noise_vel_m2s2},
        {"waypoint_mean_count", &Config::waypoint_mean_count},
        {"spline_min_waypoints", &Config::spline_min_waypoints},
        {"lqg_qp", &Config::lqg_qp},
        {"lqg_qv", &Config::lqg_qv},
        {"lqg_r", &Config::lqg_r},
        {"lqg_target_cost", &Config::lqg_target_cost},
        {"gnss_pos_sigma_m", &Config::gnss_pos_sigma_m},
        {"gnss_vel_sigma_ms", &Config::gnss_vel_sigma_ms},
        {"gnss_update_period_slots", &Config::gnss_update_period_slots},
        {"stability_rho_max", &Config::stability_rho_max},
        {"alpha_min", &Config::alpha_min},
        {"alpha_max", &Config::alpha_max},
        {"sca_prox_weight", &Config::sca_prox_weight},
        {"sca_tol", &Config::sca_tol},
        {"sca_max_iters", &Config::sca_max_iters},
        {"ga_population", &Config::ga_population},
        {"ga_generations", &Config::ga_generations},
        {"ga_tournament", &Config::ga_tournament},
        {"ga_mutation_sigma", &Config::ga_mutation_sigma},
        {"ga_elite", &Config::ga_elite},
        {"riccati_tol", &Config::riccati_tol},
        {"riccati_max_iters", &Config::riccati_max_iters},
        {"divergence_threshold_m", &Config::divergence_threshold_m},
    };
    return fields;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
    throw DomainError("config key '" + key + "': " + why);
}

}  // namespace

WaveformConfig Config::waveform() const {
    WaveformConfig wf;
    wf.carrier_frequency_hz = carrier_frequency_ghz * 1e9;
    wf.subcarrier_spacing_hz = subcarrier_spacing_khz * 1e3;
    wf.num_subcarriers = num_subcarriers;
    wf.num_symbols = num_symbols;
    wf.cp_duration_s = cp_duration_us * 1e-6;
    wf.total_power_w = dbm_to_watt(tx_power_dbm);
    wf.noise_psd_w_per_hz = dbm_to_watt(noise_psd_dbm_hz);
    return wf;
}

ArrayConfig Config::array() const { return {array_nx, array_ny, array_spacing_wavelengths}; }

CoverageRegion Config::region() const {
    return {coverage_radius_m, altitude_min_m, altitude_max_m};
}

FblParams Config::ctrl_fbl() const {
    FblParams f;
    f.blocklength_symbols = ctrl_blocklength;
    f.target_bler = ctrl_bler;
    f.payload_bits = ctrl_payload_bits;
    f.deadline_s = ctrl_deadline_mode() == CtrlDeadline::Packet
                       ? ctrl_blocklength * waveform().symbol_duration_s()
                       : slot_s;
    return f;
}

FblParams Config::comm_fbl() const {
    FblParams f;
    f.blocklength_symbols = comm_blocklength;
    f.target_bler = comm_bler;
    f.payload_bits = 0.0;
    f.deadline_s = slot_s;
    return f;
}

SensingSnrMode Config::sensing_mode() const {
    if (sensing_snr_mode == "fixed") return SensingSnrMode::Fixed;
    if (sensing_snr_mode == "budget") return SensingSnrMode::Budget;
    bad_key("sensing_snr_mode", "must be fixed|budget");
}

CtrlSnrMode Config::ctrl_mode() const {
    if (ctrl_snr_mode == "design") return CtrlSnrMode::Design;
    if (ctrl_snr_mode == "trajectory") return CtrlSnrMode::Trajectory;
    if (ctrl_snr_mode == "instantaneous") return CtrlSnrMode::Instantaneous;
    bad_key("ctrl_snr_mode", "must be design|trajectory|instantaneous");
}

CtrlDeadline Config::ctrl_deadline_mode() const {
    if (ctrl_deadline == "packet") return CtrlDeadline::Packet;
    if (ctrl_deadline == "slot") return CtrlDeadline::Slot;
    bad_key("ctrl_deadline", "must be packet|slot");
}

NoiseBandwidth Config::sensing_noise_bandwidth() const {
    if (sensing_noise_bw == "subcarrier") return NoiseBandwidth::Subcarrier;
    if (sensing_noise_bw == "fullband") return NoiseBandwidth::FullBand;
    bad_key("sensing_noise_bw", "must be subcarrier|fullband");
}

void Config::validate() const {
    auto positive = [](double v, const char* key) {
        if (!(v > 0)) bad_key(key, "must be positive");
    };
    positive(carrier_frequency_ghz, "carrier_frequency_ghz");
    positive(bandwidth_mhz, "bandwidth_mhz");
    positive(subcarrier_spacing_khz, "subcarrier_spacing_khz");
    if (num_subcarriers < 1) bad_key("num_subcarriers", "must be >= 1");
    if (num_symbols < 1) bad_key("num_symbols", "must be >= 1");
    if (cp_duration_us < 0) bad_key("cp_duration_us", "must be >= 0");
    const double b_hz = bandwidth_mhz * 1e6;
    const double ks_hz = num_subcarriers * subcarrier_spacing_khz * 1e3;
    if (std::abs(b_hz - ks_hz) > 1e-9 * b_hz)
        bad_key("bandwidth_mhz", "must equal num_subcarriers * subcarrier_spacing exactly");
    positive(coverage_radius_m, "coverage_radius_m");
    if (!(altitude_max_m > altitude_min_m && altitude_min_m >= 0))
        bad_key("altitude_max_m", "altitude range must satisfy 0 <= min < max");
    if (altitude_max_m > coverage_radius_m)
        bad_key("altitude_max_m", "must not exceed the coverage radius");
    if (array_nx < 1 || array_ny < 1) bad_key("array_nx", "array dimensions must be >= 1");
    positive(array_spacing_wavelengths, "array_spacing_wavelengths");
    positive(rcs_m2, "rcs_m2");
    positive(mission_duration_s, "mission_duration_s");
    positive(slot_s, "slot_s");
    const double slots = mission_duration_s / slot_s;
    if (std::abs(slots - std::llround(slots)) > 1e-9)
        bad_key("mission_duration_s", "must be an integer multiple of slot_s");
    if (process_noise_pos_m2 < 0 || process_noise_vel_m2s2 < 0)
        bad_key("process_noise_pos_m2", "variances must be >= 0");
    positive(lqg_qp, "lqg_qp");
    positive(lqg_qv, "lqg_qv");
    positive(lqg_r, "lqg_r");
    if (ctrl_payload_bits < 1) bad_key("ctrl_payload_bits", "must be >= 1");
    if (ctrl_blocklength < 1) bad_key("ctrl_blocklength", "must be >= 1");
    if (!(ctrl_bler > 0 && ctrl_bler < 1)) bad_key("ctrl_bler", "must lie in (0,1)");
    if (!(comm_bler > 0 && comm_bler < 1)) bad_key("comm_bler", "must lie in (0,1)");
    if (comm_min_rate_mbps < 0) bad_key("comm_min_rate_mbps", "must be >= 0");
    if (!(alpha_min > 0 && alpha_min < alpha_max && alpha_max < 1))
        bad_key("alpha_min", "need 0 < alpha_min < alpha_max < 1");
    if (!(stability_rho_max > 0 && stability_rho_max < 1))
        bad_key("stability_rho_max", "must lie in (0,1)");
    if (gnss_update_period_slots < 1) bad_key("gnss_update_period_slots", "must be >= 1");
    if (waypoint_mean_count < 1) bad_key("waypoint_mean_count", "must be >= 1");
    positive(divergence_threshold_m, "divergence_threshold_m");
    if (ga_population < 2) bad_key("ga_population", "must be >= 2");
    // Enum spellings
    (void)sensing_mode();
    (void)ctrl_mode();
    (void)ctrl_deadline_mode();
    (void)sensing_noise_bandwidth();
    waveform().validate();
}

Config parse_config(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& f : registry()) {
            if (key != f.key) continue;
            found = true;
            if (std::holds_alternative<double Config::*>(f.member)) {
                try {
                    c.*std::get<double Config::*>(f.member) = std::stod(value);
                } catch (...) {
                    bad_key(key, "not a number: '" + value + "'");
                }
            } else if (std::holds_alternative<int Config::*>(f.member)) {
                try {
                    c.*std::get<int Config::*>(f.member) = std::stoi(value);
                } catch (...) {
                    bad_key(key, "not an integer: '" + value + "'");
                }
            } else {
                c.*std::get<std::string Config::*>(f.member) = value;
            }
            break;
        }
        if (!found) bad_key(key, "unknown key");
    }
    c.validate();
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("config file not found: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const Config& c) {
    std::ostringstream out;
    for (const auto& f : registry()) {
        out << f.key << " = ";
        if (std::holds_alternative<double Config::*>(f.member))
            out << format_double(c.*std::get<double Config::*>(f.member));
        else if (std::holds_alternative<int Config::*>(f.member))
            out << c.*std::get<int Config::*>(f.member);
        else
            out << c.*std::get<std::string Config::*>(f.member);
        out << "\n";
    }
    return out.str();
}

std::string config_hash(const Config& c) {
    const std::string s = emit_config(c);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

}  // namespace iscc
