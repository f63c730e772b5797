#pragma once

#include <cstdint>
#include <string>

#include "iscc/channel.hpp"
#include "iscc/control.hpp"
#include "iscc/dynamics.hpp"
#include "iscc/trajectory.hpp"

namespace iscc {

enum class SensingSnrMode { Fixed, Budget };
enum class CtrlSnrMode { Design, Trajectory, Instantaneous };
enum class CtrlDeadline { Packet, Slot };
enum class NoiseBandwidth { Subcarrier, FullBand };

/// Flat, validated run configuration. Units live in the key names; values are
/// converted to SI on access.
struct Config {
    // Waveform / radio
    double carrier_frequency_ghz = 2.4;
    double bandwidth_mhz = 10.0;
    double subcarrier_spacing_khz = 100.0;
    int num_subcarriers = 100;
    int num_symbols = 64;
    double cp_duration_us = 2.5;
    double tx_power_dbm = 42.0;
    double noise_psd_dbm_hz = -150.0;

    // Geometry
    double gbs_height_m = 25.0;
    int array_nx = 2;
    int array_ny = 4;
    double array_spacing_wavelengths = 0.5;
    double coverage_radius_m = 1000.0;
    double altitude_min_m = 100.0;
    double altitude_max_m = 300.0;

    // Propagation
    double shadow_sigma_a_db = 4.64;
    double shadow_decay_per_m = 0.0066;
    double rcs_m2 = 0.01;
    double rician_k_db = 10.0;

    // Sensing noise / SNR model
    std::string sensing_snr_mode = "fixed";  // fixed | budget
    double sensing_snr_db = 25.0;
    std::string sensing_noise_bw = "subcarrier";  // subcarrier | fullband
    double sensing_cond_threshold = 1e12;

    // Control link
    std::string ctrl_snr_mode = "design";  // design | trajectory | instantaneous
    double ctrl_design_snr_db = 0.1;
    double ctrl_snr_margin_db = -6.1;
    std::string ctrl_deadline = "packet";  // packet | slot
    double ctrl_payload_bits = 256.0;
    double ctrl_blocklength = 50.0;
    double ctrl_bler = 1e-5;

    // Data link
    double comm_blocklength = 8000.0;
    double comm_bler = 1e-3;
    double comm_min_rate_mbps = 14.0;

    // Mission / dynamics
    double mission_duration_s = 500.0;
    double slot_s = 0.1;
    double process_noise_pos_m2 = 0.055;
    double process_noise_vel_m2s2 = 2e-5;
    double waypoint_mean_count = 8.0;
    int spline_min_waypoints = 4;

    // LQG
    double lqg_qp = 1e4;
    double lqg_qv = 1e2;
    double lqg_r = 0.01;
    double lqg_target_cost = 4000.0;

    // Baselines
    double gnss_pos_sigma_m = 3.0;
    double gnss_vel_sigma_ms = 0.2;
    int gnss_update_period_slots = 10;

    // Allocation
    double stability_rho_max = 0.4;
    double alpha_min = 0.03;
    double alpha_max = 0.97;
    double sca_prox_weight = 10.0;
    double sca_tol = 1e-8;
    int sca_max_iters = 200;
    int ga_population = 50;
    int ga_generations = 100;
    int ga_tournament = 3;
    double ga_mutation_sigma = 0.02;
    int ga_elite = 1;

    // Numerics / simulation
    double riccati_tol = 1e-10;
    int riccati_max_iters = 100000;
    double divergence_threshold_m = 1e4;

    // Derived views -----------------------------------------------------
    WaveformConfig waveform() const;
    ArrayConfig array() const;
    CoverageRegion region() const;
    SystemMatrices matrices() const { return build_matrices(slot_s); }
    ProcessNoise process_noise() const { return {process_noise_pos_m2, process_noise_vel_m2s2}; }
    LqgWeights weights() const { return {lqg_qp, lqg_qv, lqg_r}; }
    FblParams ctrl_fbl() const;
    FblParams comm_fbl() const;
    int num_slots() const { return static_cast<int>(std::llround(mission_duration_s / slot_s)); }
    Vec3 gbs_position() const { return {0.0, 0.0, gbs_height_m}; }

    SensingSnrMode sensing_mode() const;
    CtrlSnrMode ctrl_mode() const;
    CtrlDeadline ctrl_deadline_mode() const;
    NoiseBandwidth sensing_noise_bandwidth() const;

    void validate() const;
};

/// Parse a flat key=value document ('#' comments); unknown keys are rejected.
Config load_config(const std::string& path);
Config parse_config(const std::string& text);

/// Canonical emission; load(emit(c)) == c.
std::string emit_config(const Config& c);

/// FNV-1a hash of the canonical emission, as fixed-width hex.
std::string config_hash(const Config& c);

}  // namespace iscc
