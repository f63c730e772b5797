#pragma once

#include <complex>

#include "iscc/rng.hpp"
#include "iscc/types.hpp"

namespace iscc {

/// OFDM waveform and power/noise parameters shared by all three functions.
struct WaveformConfig {
    double carrier_frequency_hz = 2.4e9;
    double subcarrier_spacing_hz = 100e3;
    int num_subcarriers = 100;   // K
    int num_symbols = 64;        // M
    double cp_duration_s = 2.5e-6;
    double total_power_w = dbm_to_watt(42.0);
    double noise_psd_w_per_hz = dbm_to_watt(-150.0);

    double total_bandwidth_hz() const { return num_subcarriers * subcarrier_spacing_hz; }
    double per_subcarrier_power_w() const { return total_power_w / num_subcarriers; }
    double symbol_duration_s() const { return 1.0 / subcarrier_spacing_hz + cp_duration_s; }
    double wavelength_m() const { return kSpeedOfLight / carrier_frequency_hz; }

    void validate() const;
};

/// Drone position relative to the GBS and the derived spherical quantities.
struct Geometry {
    Vec3 position_m = Vec3::Zero();
    double range_m = 0.0;
    double azimuth_rad = 0.0;    // theta = atan2(py, px)
    double elevation_rad = 0.0;  // phi = asin(pz / range)
    Vec3 los_unit = Vec3::Zero();

    /// Build from a drone position expressed relative to the GBS antenna.
    static Geometry from_position(const Vec3& p);
};

enum class LinkKind { Communication, Sensing };

/// One slot's small-scale and shadow fading realisation.
struct FadingDraw {
    cd small_scale_gain{1.0, 0.0};  // E[|g|^2] = 1
    double shadow_db = 0.0;
    LinkKind link_kind = LinkKind::Communication;
};

/// Uniform planar array at the GBS.
struct ArrayConfig {
    int n_x = 2;
    int n_y = 4;
    double spacing_wavelengths = 0.5;

    int size() const { return n_x * n_y; }
};

/// Per-slot link snapshot: geometry plus gains and SNR.
struct LinkState {
    Geometry geometry;
    FadingDraw fading;
    double beam_gain = 1.0;         // G(theta, phi)
    double path_gain_linear = 1.0;  // beta (power scale, includes shadow)
    double snr_linear = 0.0;
};

/// Finite-blocklength parameters of one coded link.
struct FblParams {
    double blocklength_symbols = 50;  // L_i
    double target_bler = 1e-5;        // epsilon_i
    double payload_bits = 256;        // S (control only)
    double deadline_s = 0.1;          // delivery window for the payload
};

/// 3GPP UMa-AV LoS path loss in dB; range in meters, carrier in GHz.
double path_loss_db(double range_m, double carrier_ghz);

/// Round-trip sensing loss in dB: two-way path loss corrected by the target
/// RCS and the aperture term lambda^2/(4*pi). Stored so that the linear power
/// gain is beta_S = 10^-(L_S + shadow)/10.
double sensing_path_loss_db(double range_m, double carrier_ghz, double rcs_m2,
                            double wavelength_m);

/// Distance-dependent shadow-fading standard deviation in dB.
double shadow_sigma_db(double altitude_m, double sigma_a_db = 4.64,
                       double decay_per_m = 0.0066);

/// Rician small-scale gain with E[|g|^2] = 1 and the given K-factor.
cd rician_gain(double k_factor_db, Rng& rng);

/// UPA response a(theta, phi) = a_x kron a_y; unit-modulus entries.
CVecX array_response(double theta, double phi, const ArrayConfig& arr);

/// Response together with its analytic angle derivatives.
struct ArrayResponseDerivs {
    CVecX a, d_theta, d_phi;
};
ArrayResponseDerivs array_response_derivs(double theta, double phi, const ArrayConfig& arr);

/// Transmit beamforming gain G = |a^H w|^2 for a unit-norm beamformer.
double beam_gain(double theta, double phi, const ArrayConfig& arr, const CVecX& w);

/// Conjugate beamformer a*(theta, phi)/sqrt(NxNy); maximises the two-way
/// sensing gain |a^T w|.
CVecX conjugate_beamformer(double theta, double phi, const ArrayConfig& arr);

/// Received downlink SNR, Eq.-of-record form: |g|^2 Pt beta G / (N0 B).
double snr(const LinkState& link, const WaveformConfig& wf);

/// Finite-blocklength achievable rate in bits/s on fraction alpha of the band.
/// Clamped at zero when the dispersion penalty exceeds capacity.
double fbl_rate(double alpha, double bandwidth_hz, double gamma, double blocklength,
                double bler);

/// Channel dispersion V = (log2 e)^2 [1 - (1+gamma)^-2].
double fbl_dispersion(double gamma);

/// Control packet-drop probability under the delivery-deadline constraint.
double ctrl_drop_probability(double alpha_ctrl, double gamma, const WaveformConfig& wf,
                             const FblParams& fbl);

/// d/d(alpha) of ctrl_drop_probability at fixed gamma.
double ctrl_drop_probability_dalpha(double alpha_ctrl, double gamma,
                                    const WaveformConfig& wf, const FblParams& fbl);

}  // namespace iscc
