#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace iscc {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;
using Mat36 = Eigen::Matrix<double, 3, 6>;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;
using CVecX = Eigen::VectorXcd;
using cd = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;

/// Configuration or argument outside its admissible domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A requested operating point cannot satisfy the problem constraints.
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative numeric routine failed to converge.
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

}  // namespace iscc
