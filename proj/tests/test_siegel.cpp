#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "socs/siegel.hpp"

using namespace socs;

namespace {

SiegelMatrix random_siegel(std::mt19937& rng, int d) {
  std::normal_distribution<double> nd;
  Mat re(d, d), low(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      re(i, j) = nd(rng);
      low(i, j) = nd(rng);
    }
  }
  re = 0.5 * (re + re.transpose().eval());
  Mat im = low * low.transpose() + 0.05 * Mat::Identity(d, d);
  return SiegelMatrix(re.cast<cplx>() + cplx(0, 1) * im.cast<cplx>());
}

Mat random_symplectic(std::mt19937& rng, int d) {
  std::normal_distribution<double> nd;
  Mat a = Mat::Zero(d, d), b = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      a(i, j) = a(j, i) = 0.5 * nd(rng);
      b(i, j) = b(j, i) = 0.5 * nd(rng);
    }
  }
  Mat upper = Mat::Identity(2 * d, 2 * d);
  upper.topRightCorner(d, d) = a;
  Mat lower = Mat::Identity(2 * d, 2 * d);
  lower.bottomLeftCorner(d, d) = b;
  return upper * lower;
}

} // namespace

TEST_CASE("siegel matrix validation", "[siegel]") {
  CMat bad(2, 2);
  bad << cplx(0, 1), cplx(0.3, 0), cplx(0.2, 0), cplx(0, 1);
  CHECK_THROWS_AS(SiegelMatrix(bad), Error);

  CMat neg(1, 1);
  neg << cplx(0.5, -1.0);
  CHECK_THROWS_AS(SiegelMatrix(neg), Error);

  CHECK_NOTHROW(SiegelMatrix::i_identity(3));
}

TEST_CASE("gb matrix closed forms", "[siegel]") {
  CHECK(max_abs(gb_matrix(SiegelMatrix::i_identity(1)) - Mat::Identity(2, 2)) < 1e-14);
  CHECK(max_abs(gb_matrix(SiegelMatrix::i_identity(2)) - Mat::Identity(4, 4)) < 1e-14);

  // B = 1 + i: G = [[2, -1], [-1, 1]].
  CMat b(1, 1);
  b << cplx(1, 1);
  Mat expected(2, 2);
  expected << 2, -1, -1, 1;
  const Mat g = gb_matrix(SiegelMatrix(b));
  CHECK(max_abs(g - expected) < 1e-14);
  CHECK(g.determinant() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("gb matrix has unit determinant on random Siegel points", "[siegel]") {
  std::mt19937 rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    const Mat g = gb_matrix(random_siegel(rng, 1));
    CHECK(std::abs(g.determinant() - 1.0) < 1e-10);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const Mat g = gb_matrix(random_siegel(rng, 2));
    CHECK(std::abs(g.determinant() - 1.0) < 1e-9);
  }
}

TEST_CASE("siegel action: spec reference points", "[siegel]") {
  const SiegelMatrix b = SiegelMatrix::i_identity(1);
  CHECK(max_abs(CMat(siegel_action(Mat::Identity(2, 2), b).mat() - b.mat())) < 1e-14);

  // Moebius evaluation with the shear [[1,t],[0,1]].
  Mat shear(2, 2);
  shear << 1, 0.8, 0, 1;
  const SiegelMatrix moved = siegel_action(shear, b);
  CHECK(std::abs(moved.mat()(0, 0) - cplx(0.8, 1.0)) < 1e-14);

  // Rotation fixes i: numerator i e^{-it}, denominator e^{-it}.
  for (double t : {0.3, 1.7, 3.0}) {
    Mat rot(2, 2);
    rot << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    CHECK(std::abs(siegel_action(rot, b).mat()(0, 0) - cplx(0, 1)) < 1e-12);
  }

  Mat not_symplectic(2, 2);
  not_symplectic << 1, 0, 0, 2;
  CHECK_THROWS_AS(siegel_action(not_symplectic, b), Error);
}

TEST_CASE("siegel action is a group action", "[siegel]") {
  std::mt19937 rng(2025);
  for (int d : {1, 2}) {
    for (int trial = 0; trial < 20; ++trial) {
      const SiegelMatrix b = random_siegel(rng, d);
      const Mat s1 = random_symplectic(rng, d);
      const Mat s2 = random_symplectic(rng, d);
      const SiegelMatrix lhs = siegel_action(Mat(s2 * s1), b);
      const SiegelMatrix rhs = siegel_action(s2, siegel_action(s1, b));
      CHECK(max_abs(CMat(lhs.mat() - rhs.mat())) < 1e-9);
      CHECK(lhs.im_min_eig() > 0.0);
    }
  }
}

TEST_CASE("maslov tracker: spec reference points", "[siegel]") {
  const SiegelMatrix b = SiegelMatrix::i_identity(1);
  MaslovTracker tracker;
  CHECK(std::abs(tracker.prefactor_phase() - cplx(1, 0)) < 1e-15);

  // Harmonic rotation with B = i: w(t) = e^{-it}; at t = 2 pi the
  // branch-tracked prefactor is the metaplectic sign -1.
  const int n = 200;
  for (int k = 1; k <= n; ++k) {
    const double t = 2.0 * pi * k / n;
    Mat rot(2, 2);
    rot << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
    tracker = maslov_update(tracker, rot, b);
    CHECK(std::abs(tracker.w - std::exp(cplx(0, -t))) < 1e-12);
    CHECK(std::abs(tracker.prefactor_phase() - std::exp(cplx(0, 0.5 * t))) < 1e-10);
  }
  CHECK(std::abs(tracker.prefactor_phase() - cplx(-1, 0)) < 1e-10);

  // Free shear: w = 1 identically.
  MaslovTracker fr;
  for (double t : {0.5, 1.0, 4.0}) {
    Mat shear(2, 2);
    shear << 1, t, 0, 1;
    fr = maslov_update(fr, shear, b);
    CHECK(std::abs(fr.w - cplx(1, 0)) < 1e-14);
    CHECK(std::abs(fr.prefactor_phase() - cplx(1, 0)) < 1e-14);
  }

  // A coarse jump (|arg increment| >= pi/2) is refused.
  MaslovTracker coarse;
  Mat rot(2, 2);
  const double t = 2.0; // arg moves by -2
  rot << std::cos(t), std::sin(t), -std::sin(t), std::cos(t);
  CHECK_THROWS_AS(maslov_update(coarse, rot, b), Error);
}
