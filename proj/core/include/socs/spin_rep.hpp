#pragma once

#include "socs/types.hpp"

namespace socs {

/// Irreducible representation of su(2) with spin quantum number s.
///
/// Holds the three (2s+1)-dimensional Hermitian generators S1, S2, S3
/// (dimensionless, i.e. the physical spin operators divided by hbar) in the
/// weight basis where S3 = diag(s, s-1, ..., -s).  They satisfy
/// [S_j, S_k] = i eps_{jkl} S_l and S1^2 + S2^2 + S3^2 = s(s+1) Id.
class SpinRep {
public:
  /// Builds the generators by the ladder-operator construction.
  /// Throws if 2s is not a nonnegative integer (within 1e-9).
  explicit SpinRep(double s);

  double s() const { return 0.5 * static_cast<double>(two_s_); }
  int two_s() const { return two_s_; }
  int dim() const { return two_s_ + 1; }

  const CMat& S1() const { return s1_; }
  const CMat& S2() const { return s2_; }
  const CMat& S3() const { return s3_; }
  const CMat& S(int k) const; // k in {1,2,3}

  /// x1*S1 + x2*S2 + x3*S3 for x in R^3.
  CMat dot(const Vec3& x) const;

  /// Highest-weight vector |s,s> = (1,0,...,0)^T.
  CVec highest_weight() const;
  /// Lowest-weight vector |s,-s> = (0,...,0,1)^T.
  CVec lowest_weight() const;

private:
  int two_s_ = 0;
  CMat s1_, s2_, s3_;
};

/// exp(-i * angle * (axis . S)) in the given representation, computed by
/// eigendecomposition of the Hermitian matrix axis.S.  axis must be a unit
/// vector (|axis| = 1 within 1e-6; it is renormalized exactly).
CMat rep_exponential(const SpinRep& rep, const Vec3& axis, double angle);

} // namespace socs
