#pragma once

// Test-only numerical oracles, kept independent of the library code paths
// they are used to check.

#include <cmath>
#include <complex>

#include "socs/grid.hpp"
#include "socs/packet.hpp"
#include "socs/sphere_quadrature.hpp"

namespace socs::testing {

inline cplx packet_value_1d(cplx b, double hbar, double x) {
  return std::pow(pi * hbar, -0.25) * std::pow(b.imag(), 0.25) *
         std::exp(cplx(0.0, 0.5 / hbar) * b * x * x);
}

/// Wigner transform of phi^b_(0,0) at one phase-space point, straight from
/// the defining y-integral W(x,xi) = int e^{-i xi y/hbar} conj(phi(x-y/2))
/// phi(x+y/2) dy.  Resolves the oscillation only for moderate (x, xi, b).
inline double wigner_value_by_y_integral(cplx b, double hbar, double x, double xi,
                                         int nodes = 400) {
  const double sy = 2.0 * std::sqrt(hbar / (2.0 * b.imag()));
  const double ry = 12.0 * sy;
  auto [t, w] = gauss_legendre(nodes);
  cplx acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double y = ry * t[i];
    acc += w[i] * ry * std::exp(cplx(0.0, -xi * y / hbar)) *
           std::conj(packet_value_1d(b, hbar, x - 0.5 * y)) *
           packet_value_1d(b, hbar, x + 0.5 * y);
  }
  return acc.real();
}

/// The phase-space quadratic form of the Wigner Gaussian, assembled from the
/// printed block formula (not via the library's gb_matrix).
inline Mat wigner_form_1d(cplx b) {
  const double re = b.real();
  const double im = b.imag();
  Mat g(2, 2);
  g << im + re * re / im, -re / im, -re / im, 1.0 / im;
  return g;
}

/// Second moment (1/2 pi hbar) iint (x^2 + xi^2) * 2 e^{-u.G u / hbar} du by
/// two-dimensional Gauss-Legendre quadrature in the eigenframe of G (the
/// weight x^2 + xi^2 = |u|^2 is rotation invariant).
inline double wigner_moment_by_quadrature(cplx b, double hbar, int nodes = 160) {
  const Mat g = wigner_form_1d(b);
  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  const double l1 = es.eigenvalues()[0];
  const double l2 = es.eigenvalues()[1];
  const double r1 = 9.0 * std::sqrt(hbar / l1);
  const double r2 = 9.0 * std::sqrt(hbar / l2);
  auto [t, w] = gauss_legendre(nodes);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double u1 = r1 * t[i];
    for (int j = 0; j < nodes; ++j) {
      const double u2 = r2 * t[j];
      acc += w[i] * r1 * w[j] * r2 * (u1 * u1 + u2 * u2) * 2.0 *
             std::exp(-(l1 * u1 * u1 + l2 * u2 * u2) / hbar);
    }
  }
  return acc / (2.0 * pi * hbar);
}

/// Exact free evolution (H = xi^2/2, C = 0) of the packet with B(0) = i and
/// center (q, p), from the Fourier-integral closed form.
inline GridState free_packet_exact(const Grid& grid, double hbar, double q, double p, double t,
                                   const CVec& spin) {
  GridState state = make_grid_state(grid, hbar, static_cast<int>(spin.size()) - 1);
  const cplx one_it(1.0, t);
  const cplx norm = std::pow(pi * hbar, -0.25) / std::sqrt(one_it);
  for (long i = 0; i < grid.num_points(); ++i) {
    const double x = grid.coord(0, i);
    const cplx phase = cplx(0.0, 1.0 / hbar) * (p * (x - q) - 0.5 * p * p * t);
    const cplx gauss = -(x - q - p * t) * (x - q - p * t) / (2.0 * hbar * one_it);
    state.psi.row(i) = (norm * std::exp(phase + gauss)) * spin.transpose();
  }
  return state;
}

} // namespace socs::testing
