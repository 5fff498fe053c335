#pragma once

#include "socs/types.hpp"

namespace socs {

/// Element of the Siegel upper half-space: complex symmetric d x d matrix
/// with positive-definite imaginary part.
class SiegelMatrix {
public:
  explicit SiegelMatrix(CMat B);
  static SiegelMatrix i_identity(int d) { return SiegelMatrix(cplx(0, 1) * CMat::Identity(d, d)); }

  const CMat& mat() const { return b_; }
  int dim() const { return static_cast<int>(b_.rows()); }
  Mat re() const { return b_.real(); }
  Mat im() const { return b_.imag(); }
  /// Smallest eigenvalue of Im B.
  double im_min_eig() const;

private:
  CMat b_;
};

/// The 2d x 2d phase-space quadratic form of the packet's Wigner transform:
///   G_B = [ Im B + Re B (Im B)^{-1} Re B ,  -Re B (Im B)^{-1} ]
///         [ -(Im B)^{-1} Re B           ,   (Im B)^{-1}       ]
/// Symmetric, positive definite, det = 1 (it is symplectic).
Mat gb_matrix(const SiegelMatrix& B);

/// Moebius action of a symplectic matrix on the Siegel half-space,
/// S[B] = (S11 B + S12)(S21 B + S22)^{-1}.
/// Validates symplecticity of S (1e-8) and conditioning of the denominator.
SiegelMatrix siegel_action(const Mat& S, const SiegelMatrix& B);

/// Continuous branch of w(t) = det(S21(t) B0 + S22(t)) with w(0) = 1,
/// yielding the Maslov prefactor w^{-1/2} = |w|^{-1/2} exp(-i branch/2).
struct MaslovTracker {
  cplx w = cplx(1.0, 0.0);
  double branch = 0.0; // continuously tracked arg of w

  /// Phase of the branch-tracked w^{-1/2} (unit modulus; the amplitude is
  /// carried by (det Im B(t))^{1/4} in the packet normalization).
  cplx prefactor_phase() const { return std::exp(cplx(0.0, -0.5 * branch)); }
};

/// Advances the tracker to the monodromy sample S_new.  Throws if the branch
/// would be ambiguous (|arg increment| >= pi/2); sample densely enough.
MaslovTracker maslov_update(const MaslovTracker& tracker, const Mat& S_new,
                            const SiegelMatrix& B0);

} // namespace socs
