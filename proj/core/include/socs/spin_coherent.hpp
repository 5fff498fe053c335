#pragma once

#include <functional>

#include "socs/spin_rep.hpp"
#include "socs/sphere_quadrature.hpp"
#include "socs/types.hpp"

namespace socs {

/// Point on the unit sphere S^2.
class SpinDirection {
public:
  /// Normalizes the input; throws on a (near-)zero vector.
  explicit SpinDirection(const Vec3& n);
  /// Spherical angles, theta in [0, pi], phi in [0, 2pi).
  SpinDirection(double theta, double phi);

  const Vec3& n() const { return n_; }
  double theta() const; // polar angle from +e3
  double phi() const;   // azimuth in [0, 2pi); 0 when undefined at the poles

private:
  Vec3 n_;
};

/// SU(2) element stored as a unit quaternion:
/// g = a0 * Id - i (a1 sigma1 + a2 sigma2 + a3 sigma3).
struct Su2 {
  double a0 = 1.0;
  Vec3 a = Vec3::Zero();

  static Su2 identity() { return {}; }
  static Su2 from_matrix(const Mat2c& g);
  /// g = exp(-i/2 * angle * axis.sigma); axis need not be normalized here.
  static Su2 from_axis_angle(const Vec3& axis, double angle);

  Mat2c matrix() const;
  double det_defect() const { return std::abs(a0 * a0 + a.squaredNorm() - 1.0); }
  Su2 normalized() const;
  /// Rotation angle in [0, 2pi] and unit axis of g = exp(-i/2 angle axis.sigma).
  /// For g near +-Id the axis defaults to e3.
  void axis_angle(Vec3& axis, double& angle) const;
  /// Adjoint action R(g) v defined by (R(g)v).sigma = g (v.sigma) g^{-1}.
  Vec3 rotate(const Vec3& v) const;
  /// pi_s(g) in the given representation.
  CMat represent(const SpinRep& rep) const;
};

/// Local section g_n = exp(-i/2 theta e_phi.sigma) of the Hopf bundle with
/// R(g_n) e3 = n.  Defined for theta in [0, pi); throws at the south pole,
/// where no continuous choice exists.
Mat2c section_g(const SpinDirection& n);

/// Spin-coherent vector pi_s(g_n)|s,s>, phase fixed by the section g_n.
/// Throws at the south pole (theta within 1e-9 of pi).
CVec coherent_vector(const SpinRep& rep, const SpinDirection& n);

/// Like coherent_vector, but at the south pole falls back to the frame
/// rotated by pi about e1 (a fixed, documented phase convention), so initial
/// states with n = -e3 can be constructed.
CVec coherent_vector_any(const SpinRep& rep, const SpinDirection& n);

/// |<phi_m, phi_n>|; cross-checked against ((1 + m.n)/2)^s to 1e-10.
double husimi_overlap(const SpinRep& rep, const SpinDirection& m, const SpinDirection& n);

/// Complex overlap <phi_n, phi_m> with section-fixed phases.
/// Throws for an (anti-)podal pair where the phase is undefined.
cplx overlap_phase(const SpinRep& rep, const SpinDirection& n, const SpinDirection& m);

/// Berezin quantization of an upper symbol P: S^2 -> C,
///   L = (2s+1) * integral P(n) |phi_n><phi_n| dn
/// with dn the normalized area measure, evaluated by the given quadrature.
/// Throws if the quadrature is not exact up to polynomial degree 2s+2.
CMat berezin_reconstruct(const SpinRep& rep, const std::function<cplx(const Vec3&)>& symbol,
                         const SphereQuadrature& quad);

} // namespace socs
