#include "socs/sphere_quadrature.hpp"

#include <cmath>

namespace socs {

std::pair<Vec, Vec> gauss_legendre(int npts) {
  if (npts < 1) throw Error("gauss_legendre: need at least one node");
  // Jacobi matrix of the Legendre three-term recurrence.
  Mat jacobi = Mat::Zero(npts, npts);
  for (int k = 1; k < npts; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
  Vec nodes = es.eigenvalues();
  Vec weights(npts);
  for (int i = 0; i < npts; ++i) {
    const double first = es.eigenvectors()(0, i);
    weights[i] = 2.0 * first * first;
  }
  return {nodes, weights};
}

SphereQuadrature sphere_quadrature(int degree) {
  if (degree < 0) throw Error("sphere_quadrature: degree must be nonnegative");
  const int n_theta = degree / 2 + 1; // exact in u = cos(theta) to degree 2*n_theta-1 >= degree
  const int n_phi = degree + 2;       // trapezoid exact for harmonics |k| <= n_phi-1 >= degree
  auto [u, wu] = gauss_legendre(n_theta);

  SphereQuadrature quad;
  quad.exact_degree = degree;
  quad.nodes.reserve(static_cast<size_t>(n_theta) * n_phi);
  quad.weights.reserve(static_cast<size_t>(n_theta) * n_phi);
  for (int j = 0; j < n_theta; ++j) {
    const double su = std::sqrt(std::max(0.0, 1.0 - u[j] * u[j]));
    for (int k = 0; k < n_phi; ++k) {
      const double phi = 2.0 * pi * k / n_phi;
      quad.nodes.emplace_back(su * std::cos(phi), su * std::sin(phi), u[j]);
      // Normalized measure: (1/4pi) * wu * (2pi/n_phi).
      quad.weights.push_back(wu[j] / (2.0 * n_phi));
    }
  }
  return quad;
}

} // namespace socs
