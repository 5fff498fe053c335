#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "socs/experiments/config.hpp"
#include "socs/experiments/outputs.hpp"
#include "socs/experiments/runs.hpp"

using namespace socs;

namespace {

const char* kMinimalConfig = R"JSON({
  "model": {"name": "harmonic_const_field", "params": {"cz": 1.0}},
  "scenario": "A",
  "hbar_list": [0.1, 0.05],
  "s": 0.5,
  "initial": {"q": [1.0], "p": [0.0], "n": [1, 0, 0]},
  "time": {"t_final": 1.5, "samples": 3}
})JSON";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("config parsing and validation", "[experiments]") {
  const ExperimentConfig cfg = parse_config(kMinimalConfig);
  CHECK(cfg.model.name == "harmonic_const_field");
  CHECK(cfg.scenario == 'A');
  CHECK(cfg.hbar_list.size() == 2);
  CHECK(cfg.s == 0.5);
  CHECK(cfg.q0[0] == 1.0);
  CHECK(cfg.B0(0, 0) == cplx(0, 1)); // default width
  CHECK(cfg.times() == std::vector<double>{0.5, 1.0, 1.5});

  // Unknown keys are rejected at every level.
  CHECK_THROWS_AS(parse_config(R"({"model": {"name": "pendulum"}, "scenario": "A",
    "hbar_list": [0.1], "initial": {"q": [0], "p": [0]}, "time": {"t_final": 1},
    "typo_key": 1})"),
                  Error);
  CHECK_THROWS_AS(parse_config(R"({"model": {"name": "pendulum", "bogus": 1}, "scenario": "A",
    "hbar_list": [0.1], "initial": {"q": [0], "p": [0]}, "time": {"t_final": 1}})"),
                  Error);
  CHECK_THROWS_AS(parse_config(R"({"model": {"name": "pendulum", "params": {"zz": 1}},
    "scenario": "A", "hbar_list": [0.1], "initial": {"q": [0], "p": [0]},
    "time": {"t_final": 1}})"),
                  Error);
  // Scenario B needs the spin block with half-integer entries.
  CHECK_THROWS_AS(parse_config(R"({"model": {"name": "stern_gerlach"}, "scenario": "B",
    "initial": {"q": [0], "p": [0]}, "time": {"t_final": 1}})"),
                  Error);
  CHECK_THROWS_AS(parse_config(R"({"model": {"name": "stern_gerlach"}, "scenario": "B",
    "spin": {"S": 1.0, "s_list": [4, 8.3]},
    "initial": {"q": [0], "p": [0]}, "time": {"t_final": 1}})"),
                  Error);

  const ExperimentConfig b = parse_config(R"({"model": {"name": "stern_gerlach"},
    "scenario": "B", "spin": {"S": 1.0, "s_list": [4, 8, 16]},
    "initial": {"q": [0], "p": [0], "n": [0, 0, 1]}, "time": {"t_final": 1}})");
  CHECK(b.hbars() == std::vector<double>{0.25, 0.125, 0.0625});
  CHECK(b.spin_of(2) == 16.0);
}

TEST_CASE("config hash is stable under formatting", "[experiments]") {
  const std::string a = R"({"x": 1, "y": [2, 3]})";
  const std::string b = "{\n  \"y\": [2, 3],\n  \"x\": 1\n}";
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(R"({"x": 2, "y": [2, 3]})"));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("csv formatting and empty outputs", "[experiments]") {
  CHECK(format_csv({}) == "run_id,model,scenario,hbar,s,t,error_norm,theta,delta\n");

  ResultRow row;
  row.run_id = "h=0.1";
  row.model = "pendulum";
  row.scenario = 'A';
  row.hbar = 0.1;
  row.s = 0.5;
  row.t = 1.0;
  row.error_norm = 1.25e-3;
  row.theta = 1.5;
  row.delta = 2.0;
  const std::string csv = format_csv({row});
  CHECK(csv.find("h=0.1,pendulum,A,1.000000000000e-01") != std::string::npos);
  CHECK(csv.find("1.250000000000e-03") != std::string::npos);

  ExperimentOutcome outcome;
  outcome.experiment = "exactness";
  const auto dir = std::filesystem::temp_directory_path() / "socs_empty_out";
  std::filesystem::remove_all(dir);
  emit_outputs(outcome, "deadbeefdeadbeef", dir.string());
  CHECK(read_file(dir / "results.csv") ==
        "run_id,model,scenario,hbar,s,t,error_norm,theta,delta\n");
  CHECK(read_file(dir / "summary.json").find("\"config_hash\": \"deadbeefdeadbeef\"") !=
        std::string::npos);
  CHECK(std::filesystem::exists(dir / "plot_results.py"));
}

TEST_CASE("exactness runner: harmonic control stays at the solver floor", "[experiments]") {
  const ExperimentConfig cfg = parse_config(kMinimalConfig);
  const ExperimentOutcome outcome = run_quadratic_exactness(cfg);
  REQUIRE_FALSE(outcome.criteria.empty());
  CHECK(outcome.pass());
  CHECK(outcome.criteria[0].measured <= 1e-6);
  // Row-count contract: one row per (hbar, t).
  CHECK(outcome.rows.size() == cfg.hbar_list.size() * cfg.times().size());

  // Non-quadratic models are rejected.
  ExperimentConfig bad = cfg;
  bad.model = {"pendulum", {}};
  CHECK_THROWS_AS(run_quadratic_exactness(bad), Error);
}

TEST_CASE("outputs are byte-identical across reruns", "[experiments]") {
  const ExperimentConfig cfg = parse_config(kMinimalConfig);
  const auto base = std::filesystem::temp_directory_path() / "socs_determinism";
  std::filesystem::remove_all(base);

  for (const char* sub : {"a", "b"}) {
    const ExperimentOutcome outcome = run_quadratic_exactness(cfg);
    emit_outputs(outcome, config_hash(kMinimalConfig), (base / sub).string());
  }
  CHECK(read_file(base / "a" / "results.csv") == read_file(base / "b" / "results.csv"));
  CHECK(read_file(base / "a" / "summary.json") == read_file(base / "b" / "summary.json"));
}

TEST_CASE("grid planning covers the classical excursion", "[experiments]") {
  const ExperimentConfig cfg = parse_config(kMinimalConfig);
  auto model = builtin(cfg.model);
  const SpinRep rep(0.5);
  auto packet = make_packet(cfg.q0, cfg.p0, SiegelMatrix(cfg.B0), 0.05,
                            make_spin_state(rep, SpinDirection(cfg.n0)));
  const auto prop = propagate_packet_series(model, packet, FlowKind::make_skew(),
                                            {0.5 * pi, pi, 1.5 * pi, 2.0 * pi});
  const GridPlan plan = plan_grid(*model, prop, 0.05, 0.5, 10.0, 4096);
  REQUIRE(plan.feasible);
  // The orbit reaches |q| = 1 and |p| = 1; the box and the momentum budget
  // must cover both with the sigma padding.
  CHECK(plan.axis.x_min < -1.2);
  CHECK(plan.axis.x_max > 1.2);
  CHECK(plan.xi_need > 1.2);
  CHECK((plan.axis.n & (plan.axis.n - 1)) == 0);

  // Infeasible cap reported.
  const GridPlan tight = plan_grid(*model, prop, 0.0005, 0.5, 10.0, 256);
  CHECK_FALSE(tight.feasible);
}
