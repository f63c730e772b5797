#include "iscc/channel.hpp"

#include <cmath>

#include "iscc/specfun.hpp"

namespace iscc {

void WaveformConfig::validate() const {
    if (carrier_frequency_hz <= 0 || subcarrier_spacing_hz <= 0 || num_subcarriers < 1 ||
        num_symbols < 1 || cp_duration_s < 0 || total_power_w <= 0 || noise_psd_w_per_hz <= 0)
        throw DomainError("WaveformConfig: all parameters must be positive");
}

Geometry Geometry::from_position(const Vec3& p) {
    Geometry g;
    g.position_m = p;
    g.range_m = p.norm();
    if (g.range_m <= 0.0) throw DomainError("Geometry: range must be positive");
    g.azimuth_rad = std::atan2(p.y(), p.x());
    g.elevation_rad = std::asin(p.z() / g.range_m);
    g.los_unit = p / g.range_m;
    return g;
}

double path_loss_db(double range_m, double carrier_ghz) {
    if (range_m <= 0 || carrier_ghz <= 0)
        throw DomainError("path_loss_db: range and carrier must be positive");
    return 28.0 + 22.0 * std::log10(range_m) + 20.0 * std::log10(carrier_ghz);
}

double sensing_path_loss_db(double range_m, double carrier_ghz, double rcs_m2,
                            double wavelength_m) {
    if (rcs_m2 <= 0 || wavelength_m <= 0)
        throw DomainError("sensing_path_loss_db: rcs and wavelength must be positive");
    return 2.0 * path_loss_db(range_m, carrier_ghz) - 10.0 * std::log10(rcs_m2) +
           10.0 * std::log10(wavelength_m * wavelength_m / (4.0 * M_PI));
}

double shadow_sigma_db(double altitude_m, double sigma_a_db, double decay_per_m) {
    return sigma_a_db * std::exp(-decay_per_m * altitude_m);
}

cd rician_gain(double k_factor_db, Rng& rng) {
    const double k = db_to_linear(k_factor_db);
    const double mu = std::sqrt(k / (k + 1.0));
    const double sigma = std::sqrt(1.0 / (k + 1.0));
    // Scatter component is CN(0, sigma^2): sigma/sqrt(2) per real dimension.
    const double re = mu + sigma * rng.normal() / std::sqrt(2.0);
    const double im = sigma * rng.normal() / std::sqrt(2.0);
    return {re, im};
}

CVecX array_response(double theta, double phi, const ArrayConfig& arr) {
    const double ux = std::sin(theta) * std::cos(phi);
    const double uy = std::sin(theta) * std::sin(phi);
    CVecX a(arr.size());
    const double w = 2.0 * M_PI * arr.spacing_wavelengths;
    for (int i = 0; i < arr.n_x; ++i)
        for (int j = 0; j < arr.n_y; ++j)
            a[i * arr.n_y + j] = std::polar(1.0, w * (i * ux + j * uy));
    return a;
}

ArrayResponseDerivs array_response_derivs(double theta, double phi, const ArrayConfig& arr) {
    ArrayResponseDerivs r;
    r.a = array_response(theta, phi, arr);
    r.d_theta.resize(arr.size());
    r.d_phi.resize(arr.size());
    const double w = 2.0 * M_PI * arr.spacing_wavelengths;
    const double dux_dth = std::cos(theta) * std::cos(phi);
    const double duy_dth = std::cos(theta) * std::sin(phi);
    const double dux_dph = -std::sin(theta) * std::sin(phi);
    const double duy_dph = std::sin(theta) * std::cos(phi);
    for (int i = 0; i < arr.n_x; ++i)
        for (int j = 0; j < arr.n_y; ++j) {
            const int idx = i * arr.n_y + j;
            r.d_theta[idx] = cd(0, 1) * w * (i * dux_dth + j * duy_dth) * r.a[idx];
            r.d_phi[idx] = cd(0, 1) * w * (i * dux_dph + j * duy_dph) * r.a[idx];
        }
    return r;
}

double beam_gain(double theta, double phi, const ArrayConfig& arr, const CVecX& w) {
    if (std::abs(w.norm() - 1.0) > 1e-9)
        throw DomainError("beam_gain: beamformer must have unit norm");
    const cd ip = array_response(theta, phi, arr).dot(w);  // a^H w
    return std::norm(ip);
}

CVecX conjugate_beamformer(double theta, double phi, const ArrayConfig& arr) {
    CVecX w = array_response(theta, phi, arr).conjugate();
    return w / w.norm();
}

double snr(const LinkState& link, const WaveformConfig& wf) {
    const double g2 = std::norm(link.fading.small_scale_gain);
    return g2 * wf.total_power_w * link.path_gain_linear * link.beam_gain /
           (wf.noise_psd_w_per_hz * wf.total_bandwidth_hz());
}

double fbl_dispersion(double gamma) {
    const double log2e = 1.0 / std::log(2.0);
    const double t = 1.0 + gamma;
    return log2e * log2e * (1.0 - 1.0 / (t * t));
}

double fbl_rate(double alpha, double bandwidth_hz, double gamma, double blocklength,
                double bler) {
    if (gamma <= 0.0) return 0.0;
    const double v = fbl_dispersion(gamma);
    const double penalty = std::sqrt(v / blocklength) * q_inv(bler);
    const double per_hz = std::log2(1.0 + gamma) - penalty;
    return std::max(0.0, alpha * bandwidth_hz * per_hz);
}

double ctrl_drop_probability(double alpha_ctrl, double gamma, const WaveformConfig& wf,
                             const FblParams& fbl) {
    const double v = fbl_dispersion(gamma);
    if (v <= 0.0) return 1.0;  // zero SNR: nothing decodes
    const double load = fbl.payload_bits / (fbl.deadline_s * alpha_ctrl * wf.total_bandwidth_hz());
    const double arg = std::sqrt(fbl.blocklength_symbols / v) * (std::log2(1.0 + gamma) - load);
    return q_func(arg);
}

double ctrl_drop_probability_dalpha(double alpha_ctrl, double gamma,
                                    const WaveformConfig& wf, const FblParams& fbl) {
    const double v = fbl_dispersion(gamma);
    if (v <= 0.0) return 0.0;
    const double s = std::sqrt(fbl.blocklength_symbols / v);
    const double c = fbl.payload_bits / (fbl.deadline_s * wf.total_bandwidth_hz());
    const double arg = s * (std::log2(1.0 + gamma) - c / alpha_ctrl);
    // dQ(u)/du = -pdf(u); du/dalpha = s*c/alpha^2
    return -normal_pdf(arg) * s * c / (alpha_ctrl * alpha_ctrl);
}

}  // namespace iscc
