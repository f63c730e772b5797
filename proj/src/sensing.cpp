#include "iscc/sensing.hpp"

#include <cmath>

namespace iscc {

SpatialSignature spatial_signature(double theta, double phi, const ArrayConfig& arr,
                                   const CVecX& w) {
    const ArrayResponseDerivs d = array_response_derivs(theta, phi, arr);
    const cd atw = (d.a.transpose() * w)(0);        // a^T w, no conjugation
    const cd datw_th = (d.d_theta.transpose() * w)(0);
    const cd datw_ph = (d.d_phi.transpose() * w)(0);
    SpatialSignature s;
    s.eta = d.a * atw;
    s.d_theta = d.d_theta * atw + d.a * datw_th;
    s.d_phi = d.d_phi * atw + d.a * datw_ph;
    return s;
}

FimElements fim_elements(double gamma_s, const WaveformConfig& wf, double alpha_sen,
                         const SpatialSignature& sig) {
    const double n = alpha_sen * wf.num_subcarriers;
    if (n < 1.0) throw InfeasibleError("fim_elements: fewer than one sensing subcarrier");
    const double m = wf.num_symbols;
    // Centered second moments; exact discrete sums at integer counts.
    const double s2k = n * (n * n - 1.0) / 12.0;
    const double s2m = m * (m * m - 1.0) / 12.0;
    const double eta2 = sig.eta.squaredNorm();
    const double wk = 2.0 * M_PI * wf.subcarrier_spacing_hz;
    const double wm = 2.0 * M_PI * wf.symbol_duration_s();

    FimElements f;
    f.j_tau_tau = 2.0 * gamma_s * eta2 * wk * wk * s2k * m;
    f.j_theta_theta = 2.0 * gamma_s * m * n * sig.d_theta.squaredNorm();
    f.j_phi_phi = 2.0 * gamma_s * m * n * sig.d_phi.squaredNorm();
    f.j_theta_phi = 2.0 * gamma_s * m * n * sig.d_theta.dot(sig.d_phi).real();
    f.j_nu_nu = 2.0 * gamma_s * eta2 * wm * wm * s2m * n;
    return f;
}

Mat3 fim_position(const FimElements& f) {
    Mat3 j = Mat3::Zero();
    j(0, 0) = f.j_tau_tau;
    j(1, 1) = f.j_theta_theta;
    j(2, 2) = f.j_phi_phi;
    j(1, 2) = j(2, 1) = f.j_theta_phi;
    return j;
}

Mat3 position_jacobian(double tau, double theta, double phi) {
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    Mat3 u;
    u << cp * ct, -tau * cp * st, -tau * sp * ct,
         cp * st,  tau * cp * ct, -tau * sp * st,
         sp,       0.0,            tau * cp;
    return (kSpeedOfLight / 2.0) * u;
}

Mat3 crlb_position(const Mat3& fim_pos, const Mat3& jacobian, double cond_threshold) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(fim_pos);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0 || lmax / lmin > cond_threshold)
        throw InfeasibleError("crlb_position: unobservable or near-singular geometry");
    const Mat3 c = jacobian * fim_pos.ldlt().solve(jacobian.transpose());
    return 0.5 * (c + c.transpose());
}

double crlb_velocity(double j_nu_nu, double wavelength_m) {
    if (j_nu_nu <= 0.0) throw InfeasibleError("crlb_velocity: radial velocity unobservable");
    const double half_lambda = wavelength_m / 2.0;
    return half_lambda * half_lambda / j_nu_nu;
}

SensingBounds sensing_bounds(const Geometry& geom, const ArrayConfig& arr,
                             double beam_theta, double beam_phi, const WaveformConfig& wf,
                             double alpha_sen, double gamma_s, double cond_threshold) {
    const CVecX w = conjugate_beamformer(beam_theta, beam_phi, arr);
    const SpatialSignature sig =
        spatial_signature(geom.azimuth_rad, geom.elevation_rad, arr, w);
    const FimElements f = fim_elements(gamma_s, wf, alpha_sen, sig);
    const double tau = 2.0 * geom.range_m / kSpeedOfLight;
    const Mat3 jac = position_jacobian(tau, geom.azimuth_rad, geom.elevation_rad);
    SensingBounds b;
    b.crlb_position_m2 = crlb_position(fim_position(f), jac, cond_threshold);
    b.crlb_radial_velocity_m2s2 = crlb_velocity(f.j_nu_nu, wf.wavelength_m());
    return b;
}

}  // namespace iscc
