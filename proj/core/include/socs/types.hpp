#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace socs {

using cplx = std::complex<double>;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;
using Mat2c = Eigen::Matrix2cd;

inline constexpr double pi = 3.14159265358979323846;

/// Standard symplectic form J = [[0, I], [-I, 0]] on R^{2d}.
inline Mat symplectic_form(int d) {
  Mat J = Mat::Zero(2 * d, 2 * d);
  J.block(0, d, d, d) = Mat::Identity(d, d);
  J.block(d, 0, d, d) = -Mat::Identity(d, d);
  return J;
}

template <typename Derived>
double hs_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.norm();
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace socs
