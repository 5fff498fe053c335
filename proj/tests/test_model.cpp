#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "socs/model.hpp"

using namespace socs;

namespace {

Vec w2(double x, double xi) {
  Vec w(2);
  w << x, xi;
  return w;
}

// Central finite differences of h0 as the independent derivative oracle.
Vec fd_grad(const SpinOrbitModel& m, const Vec& w, double h = 1e-5) {
  Vec g(w.size());
  for (int i = 0; i < w.size(); ++i) {
    Vec wp = w, wm = w;
    wp[i] += h;
    wm[i] -= h;
    g[i] = (m.h0(wp) - m.h0(wm)) / (2 * h);
  }
  return g;
}

Mat fd_hess(const SpinOrbitModel& m, const Vec& w, double h = 1e-4) {
  const int n = static_cast<int>(w.size());
  Mat out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec wpp = w, wpm = w, wmp = w, wmm = w;
      wpp[i] += h; wpp[j] += h;
      wpm[i] += h; wpm[j] -= h;
      wmp[i] -= h; wmp[j] += h;
      wmm[i] -= h; wmm[j] -= h;
      out(i, j) = (m.h0(wpp) - m.h0(wpm) - m.h0(wmp) + m.h0(wmm)) / (4 * h * h);
    }
  }
  return out;
}

} // namespace

TEST_CASE("eval_h_so direct values", "[model]") {
  auto harmonic = builtin({"harmonic_const_field", {{"cz", 2.5}}});
  CHECK(eval_h_so(*harmonic, w2(1, 0), SpinDirection(Vec3(0, 0, 1)), 0.0) ==
        Catch::Approx(0.5).margin(1e-15));
  CHECK(eval_h_so(*harmonic, w2(1, 0), SpinDirection(Vec3(0, 0, 1)), 1.0) ==
        Catch::Approx(0.5 + 2.5).margin(1e-15));

  auto sg = builtin({"stern_gerlach", {{"b0", 0.3}, {"b1", 0.7}}});
  // H0 = xi^2/2, C = (0,0,b0+b1 x): w = (2,1), n = -e3, S = 1.
  CHECK(eval_h_so(*sg, w2(2, 1), SpinDirection(Vec3(0, 0, -1)), 1.0) ==
        Catch::Approx(0.5 - (0.3 + 2 * 0.7)).margin(1e-15));

  CHECK_THROWS_AS(eval_h_so(*sg, w2(0, 0), SpinDirection(Vec3(0, 0, 1)), -1.0), Error);
}

TEST_CASE("catalog closed forms", "[model]") {
  auto inv = builtin({"inverted_osc", {}});
  Mat h = inv->hess_h0(w2(0.3, -2.0));
  CHECK(h(0, 0) == -1.0);
  CHECK(h(1, 1) == 1.0);
  CHECK(h(0, 1) == 0.0);

  auto pend = builtin({"pendulum", {}});
  const Vec g = pend->grad_h0(w2(0.0, 0.37));
  CHECK(g[0] == Catch::Approx(0.0).margin(1e-16));
  CHECK(g[1] == Catch::Approx(0.37).margin(1e-16));

  auto quartic = builtin({"quartic_perturbed", {{"eps", 0.01}}});
  CHECK(max_abs(quartic->hess_h0(w2(0.7, -0.3)) - fd_hess(*quartic, w2(0.7, -0.3))) /
            std::max(1.0, max_abs(quartic->hess_h0(w2(0.7, -0.3)))) <
        1e-6);

  CHECK_THROWS_AS(builtin({"no_such_model", {}}), Error);
  CHECK_THROWS_AS(builtin({"pendulum", {{"mass", 2.0}}}), Error);
}

TEST_CASE("derivative consistency against finite differences", "[model]") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> ud(-1.5, 1.5);
  for (const auto& name : builtin_names()) {
    auto model = builtin({name, {}});
    for (int trial = 0; trial < 100; ++trial) {
      const Vec w = w2(ud(rng), ud(rng));
      const Vec g = model->grad_h0(w);
      const Vec g_fd = fd_grad(*model, w);
      CHECK((g - g_fd).norm() / std::max(1.0, g.norm()) < 1e-6);
      const Mat h = model->hess_h0(w);
      CHECK(max_abs(h - h.transpose().eval()) == 0.0);
      CHECK(max_abs(h - fd_hess(*model, w)) / std::max(1.0, max_abs(h)) < 1e-6);

      // Field Jacobian against finite differences.
      const Mat jac = model->jac_C(w);
      for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 2; ++i) {
          Vec wp = w, wm = w;
          wp[i] += 1e-5;
          wm[i] -= 1e-5;
          const double fd = (model->C(wp)[k] - model->C(wm)[k]) / 2e-5;
          CHECK(std::abs(jac(k, i) - fd) < 1e-6);
        }
      }
    }
  }
}

TEST_CASE("constant-field models have structurally zero field derivatives", "[model]") {
  for (const auto& name : builtin_names()) {
    auto model = builtin({name, {}});
    if (!model->constant_C()) continue;
    const Vec w = w2(0.8, -1.1);
    CHECK(model->jac_C(w).isZero(0.0));
    for (int k = 1; k <= 3; ++k) CHECK(model->hess_C(w, k).isZero(0.0));
  }
  // stern_gerlach with b1 != 0 is genuinely x-dependent.
  auto sg = builtin({"stern_gerlach", {}});
  CHECK_FALSE(sg->constant_C());
  CHECK(sg->jac_C(w2(0, 0))(2, 0) == 0.5);
  CHECK(sg->x_only_C());
}

TEST_CASE("split form accessors", "[model]") {
  auto quartic = builtin({"quartic_perturbed", {{"eps", 0.02}}});
  Vec x(1);
  x << 0.9;
  CHECK(quartic->potential(x) ==
        Catch::Approx(0.5 * 0.81 + 0.02 * std::pow(0.9, 4)).margin(1e-15));
  CHECK(quartic->mass() == 1.0);
  CHECK(quartic->split_form());
}
