#pragma once

#include "iscc/config.hpp"
#include "iscc/trajectory.hpp"

namespace iscc {

/// Link-budget policy: which SNR each subsystem sees under the configured
/// modes. All geometry is taken relative to the GBS antenna.

Geometry geometry_from_drone(const Config& cfg, const Vec3& drone_position);

/// Per-subcarrier data-link budget P_k beta_C / (N0 B) in dB at the given
/// range (no fading, no beamforming; the drone antenna is omnidirectional).
double data_snr_db(const Config& cfg, double range_m);

/// Control-link SNR in dB at the given range: data budget plus the control
/// margin.
double ctrl_snr_db_at_range(const Config& cfg, double range_m);

/// dB-averaged control-link SNR along a trajectory.
double trajectory_avg_ctrl_snr_db(const Config& cfg, const ReferenceTrajectory& traj);

/// Control SNR the offline analyses (stability threshold, allocation) use,
/// honouring ctrl_snr_mode. Instantaneous mode falls back to the design
/// point for offline work.
double offline_ctrl_snr_db(const Config& cfg, const ReferenceTrajectory& traj);

/// Per-sample per-element echo SNR feeding the sensing FIM.
double sensing_gamma_s(const Config& cfg, double range_m);

/// Average packet-drop probability at the offline control SNR.
double avg_ctrl_drop_rate(const Config& cfg, double alpha_ctrl, double ctrl_snr_db);

}  // namespace iscc
