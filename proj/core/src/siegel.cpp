#include "socs/siegel.hpp"

#include <cmath>

namespace socs {

SiegelMatrix::SiegelMatrix(CMat B) : b_(std::move(B)) {
  if (b_.rows() != b_.cols() || b_.rows() < 1) throw Error("SiegelMatrix: not square");
  if (max_abs(b_ - b_.transpose().eval()) > 1e-12) {
    throw Error("SiegelMatrix: B must be symmetric (B^T = B) to 1e-12");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(im());
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw Error("SiegelMatrix: Im B must be positive definite");
  }
}

double SiegelMatrix::im_min_eig() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(im());
  return es.eigenvalues().minCoeff();
}

Mat gb_matrix(const SiegelMatrix& B) {
  const int d = B.dim();
  const Mat re = B.re();
  const Mat im = B.im();
  const Mat im_inv = im.inverse();
  Mat g(2 * d, 2 * d);
  g.topLeftCorner(d, d) = im + re * im_inv * re;
  g.topRightCorner(d, d) = -re * im_inv;
  g.bottomLeftCorner(d, d) = -im_inv * re;
  g.bottomRightCorner(d, d) = im_inv;
  g = 0.5 * (g + g.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Mat> es(g);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw Error("gb_matrix: G_B not positive definite");
  }
  if (std::abs(g.determinant() - 1.0) > 1e-10) {
    throw Error("gb_matrix: det G_B deviates from 1 beyond 1e-10");
  }
  return g;
}

SiegelMatrix siegel_action(const Mat& S, const SiegelMatrix& B) {
  const int d = B.dim();
  if (S.rows() != 2 * d || S.cols() != 2 * d) {
    throw Error("siegel_action: symplectic matrix has wrong size");
  }
  const Mat J = symplectic_form(d);
  if (max_abs(S.transpose() * J * S - J) > 1e-8 * std::max(1.0, S.squaredNorm())) {
    throw Error("siegel_action: matrix is not symplectic to tolerance");
  }
  const CMat num = S.topLeftCorner(d, d) * B.mat() + S.topRightCorner(d, d);
  const CMat den = S.bottomLeftCorner(d, d) * B.mat() + S.bottomRightCorner(d, d);

  Eigen::JacobiSVD<CMat> svd(den);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > 1e12) {
    throw Error("siegel_action: denominator S21 B + S22 is near singular (cond > 1e12)");
  }
  CMat next = num * den.inverse();
  next = 0.5 * (next + next.transpose().eval()); // kill roundoff asymmetry
  return SiegelMatrix(next);
}

MaslovTracker maslov_update(const MaslovTracker& tracker, const Mat& S_new,
                            const SiegelMatrix& B0) {
  const int d = B0.dim();
  const CMat den = S_new.bottomLeftCorner(d, d) * B0.mat() + S_new.bottomRightCorner(d, d);
  const cplx w_new = den.determinant();
  if (std::abs(w_new) < 1e-300) throw Error("maslov_update: w vanished");
  const double delta = std::arg(w_new / tracker.w);
  if (std::abs(delta) >= 0.5 * pi) {
    throw Error("maslov_update: branch ambiguity, |arg increment| = " + std::to_string(delta) +
                " >= pi/2; refine the monodromy sampling");
  }
  MaslovTracker next;
  next.w = w_new;
  next.branch = tracker.branch + delta;
  return next;
}

} // namespace socs
