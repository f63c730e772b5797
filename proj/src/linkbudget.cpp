#include "iscc/linkbudget.hpp"

namespace iscc {

Geometry geometry_from_drone(const Config& cfg, const Vec3& drone_position) {
    return Geometry::from_position(drone_position - cfg.gbs_position());
}

double data_snr_db(const Config& cfg, double range_m) {
    const WaveformConfig wf = cfg.waveform();
    const double pk_dbm = cfg.tx_power_dbm - linear_to_db(cfg.num_subcarriers);
    const double noise_dbm =
        cfg.noise_psd_dbm_hz + linear_to_db(wf.total_bandwidth_hz());
    return pk_dbm - path_loss_db(range_m, cfg.carrier_frequency_ghz) - noise_dbm;
}

double ctrl_snr_db_at_range(const Config& cfg, double range_m) {
    return data_snr_db(cfg, range_m) + cfg.ctrl_snr_margin_db;
}

double trajectory_avg_ctrl_snr_db(const Config& cfg, const ReferenceTrajectory& traj) {
    double sum = 0.0;
    for (const auto& x : traj.states)
        sum += ctrl_snr_db_at_range(cfg, geometry_from_drone(cfg, x.head<3>()).range_m);
    return sum / traj.num_slots();
}

double offline_ctrl_snr_db(const Config& cfg, const ReferenceTrajectory& traj) {
    switch (cfg.ctrl_mode()) {
        case CtrlSnrMode::Design:
            return cfg.ctrl_design_snr_db;
        case CtrlSnrMode::Trajectory:
        case CtrlSnrMode::Instantaneous:
            return trajectory_avg_ctrl_snr_db(cfg, traj);
    }
    return cfg.ctrl_design_snr_db;
}

double sensing_gamma_s(const Config& cfg, double range_m) {
    if (cfg.sensing_mode() == SensingSnrMode::Fixed)
        return db_to_linear(cfg.sensing_snr_db);
    const WaveformConfig wf = cfg.waveform();
    const double loss_db = sensing_path_loss_db(range_m, cfg.carrier_frequency_ghz,
                                                cfg.rcs_m2, wf.wavelength_m());
    const double noise_hz = cfg.sensing_noise_bandwidth() == NoiseBandwidth::Subcarrier
                                ? wf.subcarrier_spacing_hz
                                : wf.total_bandwidth_hz();
    const double sigma2 = wf.noise_psd_w_per_hz * noise_hz;
    return wf.per_subcarrier_power_w() * db_to_linear(-loss_db) / sigma2;
}

double avg_ctrl_drop_rate(const Config& cfg, double alpha_ctrl, double snr_db) {
    return ctrl_drop_probability(alpha_ctrl, db_to_linear(snr_db), cfg.waveform(),
                                 cfg.ctrl_fbl());
}

}  // namespace iscc
