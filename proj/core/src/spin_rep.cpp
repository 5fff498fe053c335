#include "socs/spin_rep.hpp"

#include <cmath>

namespace socs {

SpinRep::SpinRep(double s) {
  const double two_s = 2.0 * s;
  const double rounded = std::round(two_s);
  if (s < 0.0 || std::abs(two_s - rounded) > 1e-9) {
    throw Error("SpinRep: spin quantum number must be a nonnegative half-integer, got s=" +
                std::to_string(s));
  }
  two_s_ = static_cast<int>(rounded);

  const int n = two_s_ + 1;
  const double sv = 0.5 * two_s_;

  // Weight basis: index i holds m = s - i.
  CMat splus = CMat::Zero(n, n);
  s3_ = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double m = sv - i;
    s3_(i, i) = m;
    if (i > 0) {
      // S+ |s,m> = sqrt(s(s+1) - m(m+1)) |s,m+1>, here acting on column i.
      splus(i - 1, i) = std::sqrt(sv * (sv + 1.0) - m * (m + 1.0));
    }
  }
  const CMat sminus = splus.adjoint();
  s1_ = 0.5 * (splus + sminus);
  s2_ = cplx(0.0, -0.5) * (splus - sminus);
}

const CMat& SpinRep::S(int k) const {
  switch (k) {
    case 1: return s1_;
    case 2: return s2_;
    case 3: return s3_;
    default: throw Error("SpinRep::S: component index must be 1, 2 or 3");
  }
}

CMat SpinRep::dot(const Vec3& x) const {
  return x[0] * s1_ + x[1] * s2_ + x[2] * s3_;
}

CVec SpinRep::highest_weight() const {
  CVec v = CVec::Zero(dim());
  v[0] = 1.0;
  return v;
}

CVec SpinRep::lowest_weight() const {
  CVec v = CVec::Zero(dim());
  v[dim() - 1] = 1.0;
  return v;
}

CMat rep_exponential(const SpinRep& rep, const Vec3& axis, double angle) {
  const double norm = axis.norm();
  if (std::abs(norm - 1.0) > 1e-6) {
    throw Error("rep_exponential: axis must be a unit vector");
  }
  const Vec3 unit = axis / norm;
  Eigen::SelfAdjointEigenSolver<CMat> es(rep.dot(unit));
  const Vec& lambda = es.eigenvalues();
  CVec phases(lambda.size());
  for (int i = 0; i < lambda.size(); ++i) {
    phases[i] = std::exp(cplx(0.0, -angle * lambda[i]));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace socs
