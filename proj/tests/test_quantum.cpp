#include <catch2/catch_amalgamated.hpp>

#include "socs/packet.hpp"
#include "socs/split_operator.hpp"
#include "support/oracles.hpp"

using namespace socs;

namespace {

Vec v1(double x) {
  Vec v(1);
  v << x;
  return v;
}

GaussianPacket packet1d(double q, double p, double hbar, const Vec3& n, double s = 0.5) {
  const SpinRep rep(s);
  return make_packet(v1(q), v1(p), SiegelMatrix::i_identity(1), hbar,
                     make_spin_state(rep, SpinDirection(n)));
}

Grid grid1d(double lo, double hi, int n) { return Grid({GridAxis{lo, hi, n}}); }

// d = 2 isotropic harmonic oscillator with a constant field, used to exercise
// the general-dimension paths.
class Harmonic2D final : public SpinOrbitModel {
public:
  std::string name() const override { return "harmonic_2d"; }
  int dim() const override { return 2; }
  double h0(const Vec& w) const override { return 0.5 * w.squaredNorm(); }
  Vec grad_h0(const Vec& w) const override { return w; }
  Mat hess_h0(const Vec& w) const override {
    return Mat::Identity(w.size(), w.size());
  }
  Vec3 C(const Vec&) const override { return Vec3(0, 0, 1); }
  Mat jac_C(const Vec&) const override { return Mat::Zero(3, 4); }
  Mat hess_C(const Vec&, int) const override { return Mat::Zero(4, 4); }
  bool constant_C() const override { return true; }
  bool x_only_C() const override { return true; }
  bool quadratic_h0() const override { return true; }
  Eigen::Vector2d growth_exponents() const override { return {2, 2}; }
};

} // namespace

TEST_CASE("error_norm identities", "[quantum]") {
  const Grid grid = grid1d(-4, 4, 256);
  auto packet = packet1d(0, 0, 0.1, Vec3(0, 0, 1));
  const GridState a = evaluate_packet(packet, grid);
  CHECK(error_norm(a, a) == 0.0);

  // Orthonormal pair: spin-up vs spin-down packet.
  auto down = packet1d(0, 0, 0.1, Vec3(0, 0, -1));
  const GridState b = evaluate_packet(down, grid);
  CHECK(error_norm(a, b) == Catch::Approx(std::sqrt(2.0)).margin(1e-9));

  // Pure phase: || psi - e^{i theta} psi || = 2 |sin(theta/2)|.
  for (double theta : {0.3, 1.0, 2.8}) {
    GridState c = a;
    c.psi *= std::exp(cplx(0, theta));
    CHECK(error_norm(a, c) ==
          Catch::Approx(2.0 * std::abs(std::sin(0.5 * theta))).margin(1e-9));
  }
}

TEST_CASE("free split-step matches the closed form and the packet", "[quantum]") {
  const double hbar = 0.05;
  auto model = builtin({"free_const_field", {{"cz", 0.0}}});
  auto packet = packet1d(0.3, 0.8, hbar, Vec3(0, 0, 1));
  const Grid grid = grid1d(-4, 5, 1024);
  const GridState psi0 = evaluate_packet(packet, grid);

  PropagatorConfig config;
  config.dt = 5e-4;
  const double t = 1.2;
  const GridState numeric = split_step(model, psi0, config, t);

  const GridState exact = testing::free_packet_exact(grid, hbar, 0.3, 0.8, t, packet.spin->v);
  CHECK(error_norm(numeric, exact) < 1e-8);

  const GridState semiclassical =
      evaluate_packet(propagate_packet_scenario_a(model, packet, t), grid);
  CHECK(error_norm(numeric, semiclassical) < 1e-8);
}

TEST_CASE("quadratic exactness: harmonic with constant field, s = 1/2", "[quantum]") {
  const double hbar = 0.05;
  auto model = builtin({"harmonic_const_field", {{"cz", 1.0}}});
  auto packet = packet1d(1.0, 0.0, hbar, Vec3(1, 0, 0));
  const Grid grid = grid1d(-3.5, 3.5, 512);
  const GridState psi0 = evaluate_packet(packet, grid);

  PropagatorConfig config;
  config.dt = 2.5e-4;
  const std::vector<double> times = {0.5 * pi, pi, 2.0 * pi};
  SplitStepPropagator prop(model, grid, hbar, 1, config);
  const auto quantum = prop.propagate_series(psi0, times);
  const auto semi = propagate_packet_series(model, packet, FlowKind::make_skew(), times);

  for (size_t i = 0; i < times.size(); ++i) {
    const GridState sc = evaluate_packet(semi.packets[i], grid);
    CHECK(error_norm(quantum[i], sc) < 1e-6);
  }

  // Maslov sign is part of the match: at t = 2 pi the overlap with the
  // initial state times -1 cancels the prefactor up to e^{i s rho}.
  const cplx ov = overlap(psi0, quantum.back());
  CHECK(std::abs(std::abs(ov) - std::abs(overlap(psi0, evaluate_packet(semi.packets.back(), grid)))) <
        1e-6);
}

TEST_CASE("unitarity over ten thousand steps", "[quantum]") {
  const double hbar = 0.1;
  auto model = builtin({"quartic_perturbed", {}});
  auto packet = packet1d(0.4, 0.0, hbar, Vec3(0, 0, 1));
  const Grid grid = grid1d(-4, 4, 256);
  GridState psi = evaluate_packet(packet, grid);
  const double norm0 = psi.norm();

  PropagatorConfig config;
  config.dt = 1e-4;
  const GridState evolved = split_step(model, psi, config, 1.0); // 10^4 steps
  CHECK(std::abs(evolved.norm() - norm0) <= 1e-10);
}

TEST_CASE("observables localize at the classical data", "[quantum]") {
  const double hbar = 0.05;
  auto model = builtin({"harmonic_const_field", {{"cz", 0.7}}});
  const Vec3 n0 = Vec3(0.6, 0, 0.8);
  auto packet = packet1d(0.9, -0.2, hbar, n0);
  const Grid grid = grid1d(-4, 4, 512);
  const GridState psi = evaluate_packet(packet, grid);

  const auto rec = observables(psi, model);
  CHECK(rec.x_mean[0] == Catch::Approx(0.9).margin(1e-8));
  CHECK(rec.p_mean[0] == Catch::Approx(-0.2).margin(1e-8));
  CHECK((rec.spin_mean - 0.5 * n0).norm() < 1e-8);

  // Parity-symmetric state: <x> = 0.
  auto centered = packet1d(0, 0, hbar, Vec3(0, 0, 1));
  CHECK(std::abs(observables(evaluate_packet(centered, grid), model).x_mean[0]) < 1e-12);

  // Energy conservation over t = 10 (splitting error scales as dt^2).
  PropagatorConfig config;
  config.dt = 2e-4;
  SplitStepPropagator prop(model, grid, hbar, 1, config);
  const auto states = prop.propagate_series(psi, {5.0, 10.0});
  const double e0 = rec.energy;
  for (const auto& st : states) {
    CHECK(std::abs(observables(st, model).energy - e0) / std::abs(e0) < 1e-8);
  }

  // Eigen-configuration (packet at the origin, spin along the field):
  // stationary state, drift below 1e-10.
  auto eigen_packet = packet1d(0, 0, hbar, Vec3(0, 0, 1));
  const GridState ground = evaluate_packet(eigen_packet, grid);
  const double ground_e = observables(ground, model).energy;
  const GridState ground_t = prop.propagate(ground, 10.0);
  CHECK(std::abs(observables(ground_t, model).energy - ground_e) / std::abs(ground_e) < 1e-10);
}

TEST_CASE("tail monitoring aborts on wrap-around", "[quantum]") {
  const double hbar = 0.05;
  auto model = builtin({"free_const_field", {{"cz", 0.0}}});
  auto packet = packet1d(0.0, 1.5, hbar, Vec3(0, 0, 1));
  const Grid grid = grid1d(-2, 2, 256);
  const GridState psi0 = evaluate_packet(packet, grid);
  PropagatorConfig config;
  config.dt = 1e-3;
  CHECK_THROWS_AS(split_step(model, psi0, config, 3.0), Error);
}

TEST_CASE("two-dimensional grid: quadratic exactness", "[quantum]") {
  const double hbar = 0.1;
  auto model = std::make_shared<Harmonic2D>();
  const SpinRep rep(0.5);

  Vec q(2), p(2);
  q << 0.5, -0.3;
  p << 0.0, 0.4;
  auto packet = make_packet(q, p, SiegelMatrix::i_identity(2), hbar,
                            make_spin_state(rep, SpinDirection(Vec3(1, 0, 0))));

  const Grid grid({GridAxis{-4, 4, 64}, GridAxis{-4, 4, 64}});
  const GridState psi0 = evaluate_packet(packet, grid);
  CHECK(std::abs(psi0.norm() - 1.0) < 1e-9);

  PropagatorConfig config;
  config.dt = 1e-3;
  const double t = 1.0;
  const GridState quantum = split_step(model, psi0, config, t);
  const GridState semi =
      evaluate_packet(propagate_packet_scenario_a(model, packet, t), grid);
  CHECK(error_norm(quantum, semi) < 1e-6);
}
