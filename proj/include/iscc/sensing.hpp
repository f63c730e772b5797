#pragma once

#include "iscc/channel.hpp"
#include "iscc/types.hpp"

namespace iscc {

/// Two-way spatial signature eta = a (a^T w) and its angle derivatives,
/// with the beamformer held fixed under differentiation.
struct SpatialSignature {
    CVecX eta, d_theta, d_phi;
};

SpatialSignature spatial_signature(double theta, double phi, const ArrayConfig& arr,
                                   const CVecX& w);

/// Nonzero Fisher information entries over (tau_S, theta, phi, nu_S).
/// Delay/Doppler phases are referenced to the centre of the sensing grid, so
/// the position block decouples exactly from the Doppler entry.
struct FimElements {
    double j_tau_tau = 0, j_theta_theta = 0, j_phi_phi = 0, j_theta_phi = 0, j_nu_nu = 0;
};

/// Echo-domain FIM for a per-sample per-element echo SNR `gamma_s`
/// (P_k beta_S E|g|^2 / sigma^2, array factors excluded) on the fraction
/// alpha_sen of subcarriers. alpha_sen*K is treated as continuous.
FimElements fim_elements(double gamma_s, const WaveformConfig& wf, double alpha_sen,
                         const SpatialSignature& sig);

/// 3x3 position-parameter FIM over (tau_S, theta, phi).
Mat3 fim_position(const FimElements& f);

/// Jacobian of p = (c tau/2) u(theta, phi) w.r.t. (tau, theta, phi).
Mat3 position_jacobian(double tau, double theta, double phi);

/// CRLB_p = Upsilon J_p^{-1} Upsilon^T; throws on singular geometry.
Mat3 crlb_position(const Mat3& fim_pos, const Mat3& jacobian,
                   double cond_threshold = 1e12);

/// CRLB of the radial velocity, (lambda/2)^2 / J_nunu.
double crlb_velocity(double j_nu_nu, double wavelength_m);

/// Bundled per-slot bounds used as the observation-noise covariance.
struct SensingBounds {
    Mat3 crlb_position_m2 = Mat3::Zero();
    double crlb_radial_velocity_m2s2 = 0.0;

    double peb_m() const { return std::sqrt(crlb_position_m2.trace()); }
    double veb_ms() const { return std::sqrt(crlb_radial_velocity_m2s2); }
};

/// Evaluate all bounds for one slot's geometry with a conjugate beam steered
/// at (beam_theta, beam_phi).
SensingBounds sensing_bounds(const Geometry& geom, const ArrayConfig& arr,
                             double beam_theta, double beam_phi, const WaveformConfig& wf,
                             double alpha_sen, double gamma_s,
                             double cond_threshold = 1e12);

}  // namespace iscc
