#pragma once

#include <utility>
#include <vector>

#include "socs/types.hpp"

namespace socs {

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
/// Exact for polynomials of degree <= 2*npts - 1.
std::pair<Vec, Vec> gauss_legendre(int npts);

/// Quadrature for the normalized area measure on S^2 (weights sum to 1).
struct SphereQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  int exact_degree = 0; // exact for Cartesian polynomials in n up to this degree
};

/// Product rule: Gauss-Legendre in cos(theta) x uniform trapezoid in phi,
/// sized to integrate polynomials in n exactly up to the requested degree.
SphereQuadrature sphere_quadrature(int degree);

} // namespace socs
