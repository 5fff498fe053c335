#include "socs/spin_coherent.hpp"

#include <cmath>

namespace socs {

namespace {
constexpr double kPoleTol = 1e-9;
}

SpinDirection::SpinDirection(const Vec3& n) {
  const double norm = n.norm();
  if (norm < 1e-12) throw Error("SpinDirection: zero vector");
  n_ = n / norm;
}

SpinDirection::SpinDirection(double theta, double phi) {
  n_ = Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
  n_.normalize();
}

double SpinDirection::theta() const {
  return std::atan2(std::hypot(n_[0], n_[1]), n_[2]);
}

double SpinDirection::phi() const {
  if (std::hypot(n_[0], n_[1]) < 1e-300) return 0.0;
  double p = std::atan2(n_[1], n_[0]);
  if (p < 0.0) p += 2.0 * pi;
  return p;
}

Su2 Su2::from_matrix(const Mat2c& g) {
  Su2 q;
  q.a0 = 0.5 * (g(0, 0).real() + g(1, 1).real());
  q.a[0] = -0.5 * (g(0, 1).imag() + g(1, 0).imag());
  q.a[1] = 0.5 * (g(1, 0).real() - g(0, 1).real());
  q.a[2] = 0.5 * (g(1, 1).imag() - g(0, 0).imag());
  return q;
}

Su2 Su2::from_axis_angle(const Vec3& axis, double angle) {
  const double norm = axis.norm();
  Su2 q;
  if (norm < 1e-300) return q;
  q.a0 = std::cos(0.5 * angle);
  q.a = std::sin(0.5 * angle) * (axis / norm);
  return q;
}

Mat2c Su2::matrix() const {
  Mat2c g;
  g(0, 0) = cplx(a0, -a[2]);
  g(0, 1) = cplx(-a[1], -a[0]);
  g(1, 0) = cplx(a[1], -a[0]);
  g(1, 1) = cplx(a0, a[2]);
  return g;
}

Su2 Su2::normalized() const {
  const double norm = std::sqrt(a0 * a0 + a.squaredNorm());
  if (norm < 1e-300) throw Error("Su2::normalized: degenerate quaternion");
  Su2 q;
  q.a0 = a0 / norm;
  q.a = a / norm;
  return q;
}

void Su2::axis_angle(Vec3& axis, double& angle) const {
  const double sin_half = a.norm();
  angle = 2.0 * std::atan2(sin_half, a0);
  axis = (sin_half < 1e-14) ? Vec3(0, 0, 1) : Vec3(a / sin_half);
}

Vec3 Su2::rotate(const Vec3& v) const {
  // Rodrigues form of the adjoint action of a unit quaternion.
  return (a0 * a0 - a.squaredNorm()) * v + 2.0 * a.dot(v) * a + 2.0 * a0 * a.cross(v);
}

CMat Su2::represent(const SpinRep& rep) const {
  Vec3 axis;
  double angle;
  axis_angle(axis, angle);
  return rep_exponential(rep, axis, angle);
}

Mat2c section_g(const SpinDirection& n) {
  const double theta = n.theta();
  if (theta > pi - kPoleTol) {
    throw Error("section_g: theta = pi excluded (no smooth section at the south pole); "
                "rotate the frame first");
  }
  const double phi = n.phi();
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  Mat2c g;
  g(0, 0) = c;
  g(0, 1) = -s * std::exp(cplx(0.0, -phi));
  g(1, 0) = s * std::exp(cplx(0.0, phi));
  g(1, 1) = c;
  return g;
}

CVec coherent_vector(const SpinRep& rep, const SpinDirection& n) {
  const double theta = n.theta();
  if (theta > pi - kPoleTol) {
    throw Error("coherent_vector: south pole excluded by the section convention");
  }
  if (theta < kPoleTol) return rep.highest_weight();
  // g_n rotates about e_phi = normalize(e3 x n) by theta.
  const Vec3 axis = Vec3(-n.n()[1], n.n()[0], 0.0).normalized();
  return rep_exponential(rep, axis, theta) * rep.highest_weight();
}

CVec coherent_vector_any(const SpinRep& rep, const SpinDirection& n) {
  if (n.theta() > pi - kPoleTol) {
    return rep_exponential(rep, Vec3(1, 0, 0), pi) * rep.highest_weight();
  }
  return coherent_vector(rep, n);
}

double husimi_overlap(const SpinRep& rep, const SpinDirection& m, const SpinDirection& n) {
  const double dot = m.n().dot(n.n());
  const double closed_form = std::pow(0.5 * (1.0 + dot), rep.s());
  const double value =
      std::abs(coherent_vector_any(rep, m).dot(coherent_vector_any(rep, n)));
  if (std::abs(value - closed_form) > 1e-10) {
    throw Error("husimi_overlap: inner product disagrees with ((1+m.n)/2)^s beyond 1e-10");
  }
  return value;
}

cplx overlap_phase(const SpinRep& rep, const SpinDirection& n, const SpinDirection& m) {
  if (1.0 + n.n().dot(m.n()) < 1e-14) {
    throw Error("overlap_phase: antipodal pair, modulus 0 and phase undefined");
  }
  return coherent_vector_any(rep, n).dot(coherent_vector_any(rep, m));
}

CMat berezin_reconstruct(const SpinRep& rep, const std::function<cplx(const Vec3&)>& symbol,
                         const SphereQuadrature& quad) {
  const int needed = rep.two_s() + 2;
  if (quad.exact_degree < needed) {
    throw Error("berezin_reconstruct: quadrature exact to degree " +
                std::to_string(quad.exact_degree) + " but degree >= " + std::to_string(needed) +
                " required for s = " + std::to_string(rep.s()));
  }
  const int dim = rep.dim();
  CMat out = CMat::Zero(dim, dim);
  for (size_t i = 0; i < quad.nodes.size(); ++i) {
    const CVec v = coherent_vector(rep, SpinDirection(quad.nodes[i]));
    out += (2.0 * rep.s() + 1.0) * quad.weights[i] * symbol(quad.nodes[i]) * (v * v.adjoint());
  }
  return out;
}

} // namespace socs
