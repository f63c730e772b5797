#pragma once

// Test-only reference implementations, independent of the library's analytic
// paths. Kept deliberately brute-force.

#include <complex>
#include <functional>
#include <vector>

#include "iscc/channel.hpp"
#include "iscc/sensing.hpp"

namespace iscc::oracle {

/// Noiseless echo mean mu_{m,k}(xi) for parameter vector xi = (tau, theta,
/// phi, nu), evaluated over a centered (m,k) grid with a fixed beamformer.
/// Per-sample amplitude is normalised so that the per-sample per-element echo
/// SNR equals gamma_s when the noise variance is 1.
inline std::vector<CVecX> echo_means(double tau, double theta, double phi, double nu,
                                     double gamma_s, const WaveformConfig& wf,
                                     int n_sen, const ArrayConfig& arr, const CVecX& w) {
    const double amp = std::sqrt(gamma_s);
    const SpatialSignature sig = spatial_signature(theta, phi, arr, w);
    std::vector<CVecX> mu;
    mu.reserve(static_cast<std::size_t>(wf.num_symbols) * n_sen);
    for (int m = 0; m < wf.num_symbols; ++m) {
        const double bm = 2.0 * M_PI * wf.symbol_duration_s() *
                          (m - 0.5 * (wf.num_symbols - 1));
        for (int k = 0; k < n_sen; ++k) {
            const double ak = 2.0 * M_PI * wf.subcarrier_spacing_hz * (k - 0.5 * (n_sen - 1));
            mu.push_back(amp * std::polar(1.0, -ak * tau + bm * nu) * sig.eta);
        }
    }
    return mu;
}

/// Brute-force 4x4 FIM by central differences of the echo mean, summed over
/// the grid: J_ij = 2 sum Re[(d mu / d xi_i)^H (d mu / d xi_j)] (unit noise).
inline Eigen::Matrix4d fim_numeric(double tau, double theta, double phi, double nu,
                                   double gamma_s, const WaveformConfig& wf, int n_sen,
                                   const ArrayConfig& arr, const CVecX& w) {
    const std::array<double, 4> h = {1e-10, 1e-6, 1e-6, 1e-2};  // tau, theta, phi, nu steps
    auto eval = [&](const std::array<double, 4>& xi) {
        return echo_means(xi[0], xi[1], xi[2], xi[3], gamma_s, wf, n_sen, arr, w);
    };
    const std::array<double, 4> xi0 = {tau, theta, phi, nu};
    std::array<std::vector<CVecX>, 4> deriv;
    for (int i = 0; i < 4; ++i) {
        auto plus = xi0, minus = xi0;
        plus[i] += h[i];
        minus[i] -= h[i];
        const auto mp = eval(plus), mm = eval(minus);
        deriv[i].resize(mp.size());
        for (std::size_t s = 0; s < mp.size(); ++s)
            deriv[i][s] = (mp[s] - mm[s]) / (2.0 * h[i]);
    }
    Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 4; ++i)
        for (int jj = 0; jj < 4; ++jj) {
            double acc = 0.0;
            for (std::size_t s = 0; s < deriv[i].size(); ++s)
                acc += deriv[i][s].dot(deriv[jj][s]).real();  // conjugates first arg
            j(i, jj) = 2.0 * acc;
        }
    return j;
}

/// Central finite difference of a scalar function.
inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace iscc::oracle
