#include "socs/experiments/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace socs {

using nlohmann::json;

namespace {

void expect_keys(const json& j, const std::string& where, const std::set<std::string>& known) {
  if (!j.is_object()) throw Error("config: " + where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.contains(key)) {
      throw Error("config: unknown key '" + key + "' in " + where);
    }
  }
}

Vec parse_vec(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw Error("config: " + where + " must be a nonempty array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<long>(i)] = j[i].get<double>();
  return v;
}

CMat parse_b(const json& jre, const json& jim, const std::string& where) {
  if (!jre.is_array() || !jim.is_array() || jre.size() != jim.size()) {
    throw Error("config: " + where + " b_re/b_im must be arrays of matching shape");
  }
  const int d = static_cast<int>(jre.size());
  CMat b(d, d);
  for (int r = 0; r < d; ++r) {
    if (jre[r].size() != static_cast<size_t>(d) || jim[r].size() != static_cast<size_t>(d)) {
      throw Error("config: " + where + " width matrix must be square");
    }
    for (int c = 0; c < d; ++c) {
      b(r, c) = cplx(jre[r][c].get<double>(), jim[r][c].get<double>());
    }
  }
  return b;
}

} // namespace

std::vector<double> ExperimentConfig::times() const {
  if (!t_grid.empty()) return t_grid;
  std::vector<double> out;
  for (int k = 1; k <= t_samples; ++k) {
    out.push_back(t_final * k / t_samples);
  }
  return out;
}

std::vector<double> ExperimentConfig::hbars() const {
  if (scenario == 'A') return hbar_list;
  std::vector<double> out;
  out.reserve(s_list.size());
  for (double sv : s_list) out.push_back(S / sv);
  return out;
}

double ExperimentConfig::spin_of(size_t index) const {
  return scenario == 'A' ? s : s_list.at(index);
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }

  expect_keys(j, "document",
              {"model", "scenario", "hbar_list", "spin", "s", "initial", "time", "quantum",
               "classical", "ehrenfest", "out_dir"});

  ExperimentConfig cfg;

  const json& jm = j.at("model");
  expect_keys(jm, "model", {"name", "params"});
  cfg.model.name = jm.at("name").get<std::string>();
  if (jm.contains("params")) {
    for (const auto& [key, value] : jm.at("params").items()) {
      cfg.model.params[key] = value.get<double>();
    }
  }
  (void)builtin(cfg.model); // validates the id and its parameter keys

  const std::string sc = j.value("scenario", "A");
  if (sc != "A" && sc != "B") throw Error("config: scenario must be \"A\" or \"B\"");
  cfg.scenario = sc[0];

  if (cfg.scenario == 'A') {
    if (!j.contains("hbar_list")) throw Error("config: scenario A requires hbar_list");
    for (const auto& v : j.at("hbar_list")) {
      const double h = v.get<double>();
      if (h <= 0.0 || h > 1.0) throw Error("config: hbar values must lie in (0, 1]");
      cfg.hbar_list.push_back(h);
    }
    cfg.s = j.value("s", 0.5);
    if (std::abs(2 * cfg.s - std::round(2 * cfg.s)) > 1e-12 || cfg.s < 0) {
      throw Error("config: s must be a nonnegative half-integer");
    }
  } else {
    if (!j.contains("spin")) throw Error("config: scenario B requires the spin block {S, s_list}");
    const json& js = j.at("spin");
    expect_keys(js, "spin", {"S", "s_list"});
    cfg.S = js.at("S").get<double>();
    if (cfg.S <= 0.0) throw Error("config: spin.S must be positive");
    for (const auto& v : js.at("s_list")) {
      const double sv = v.get<double>();
      if (sv <= 0.0 || std::abs(2 * sv - std::round(2 * sv)) > 1e-12) {
        throw Error("config: spin.s_list entries must be positive half-integers");
      }
      cfg.s_list.push_back(sv);
    }
    if (cfg.s_list.empty()) throw Error("config: spin.s_list must be nonempty");
  }

  const json& ji = j.at("initial");
  expect_keys(ji, "initial", {"q", "p", "b_re", "b_im", "n"});
  cfg.q0 = parse_vec(ji.at("q"), "initial.q");
  cfg.p0 = parse_vec(ji.at("p"), "initial.p");
  if (cfg.q0.size() != cfg.p0.size()) throw Error("config: initial q and p differ in dimension");
  if (ji.contains("b_re") != ji.contains("b_im")) {
    throw Error("config: provide both b_re and b_im or neither");
  }
  if (ji.contains("b_re")) {
    cfg.B0 = parse_b(ji.at("b_re"), ji.at("b_im"), "initial");
  } else {
    cfg.B0 = cplx(0, 1) * CMat::Identity(cfg.q0.size(), cfg.q0.size());
  }
  if (ji.contains("n")) {
    const auto& jn = ji.at("n");
    if (jn.size() != 3) throw Error("config: initial.n must have 3 components");
    cfg.n0 = Vec3(jn[0].get<double>(), jn[1].get<double>(), jn[2].get<double>());
    if (cfg.n0.norm() < 1e-12) throw Error("config: initial.n must be nonzero");
    cfg.n0.normalize();
  }

  const json& jt = j.at("time");
  expect_keys(jt, "time", {"t_final", "samples", "grid"});
  if (jt.contains("grid")) {
    double prev = 0.0;
    for (const auto& v : jt.at("grid")) {
      const double t = v.get<double>();
      if (t <= prev) throw Error("config: time.grid must be strictly increasing and positive");
      cfg.t_grid.push_back(t);
      prev = t;
    }
    cfg.t_final = cfg.t_grid.back();
  } else {
    cfg.t_final = jt.at("t_final").get<double>();
    cfg.t_samples = jt.value("samples", 8);
    if (cfg.t_final <= 0.0 || cfg.t_samples < 1) throw Error("config: invalid time block");
  }

  if (j.contains("quantum")) {
    const json& jq = j.at("quantum");
    expect_keys(jq, "quantum",
                {"dt", "n_max", "tail_threshold", "pad_sigma", "x_min", "x_max", "n"});
    cfg.quantum.dt = jq.value("dt", 0.0);
    cfg.quantum.n_max = jq.value("n_max", 4096);
    cfg.quantum.tail_threshold = jq.value("tail_threshold", 1e-10);
    cfg.quantum.pad_sigma = jq.value("pad_sigma", 10.0);
    if (jq.contains("n")) {
      cfg.quantum.auto_grid = false;
      cfg.quantum.x_min = jq.at("x_min").get<double>();
      cfg.quantum.x_max = jq.at("x_max").get<double>();
      cfg.quantum.n = jq.at("n").get<int>();
    }
  }

  if (j.contains("classical")) {
    const json& jc = j.at("classical");
    expect_keys(jc, "classical", {"rtol", "atol", "dt_max"});
    cfg.classical.rtol = jc.value("rtol", 1e-10);
    cfg.classical.atol = jc.value("atol", 1e-10);
    cfg.classical.dt_max = jc.value("dt_max", 0.02);
  }

  if (j.contains("ehrenfest")) {
    const json& je = j.at("ehrenfest");
    expect_keys(je, "ehrenfest", {"threshold", "regime", "lyapunov_time"});
    cfg.ehrenfest.threshold = je.value("threshold", 0.1);
    cfg.ehrenfest.regime = je.value("regime", "hyperbolic");
    cfg.ehrenfest.lyapunov_time = je.value("lyapunov_time", 40.0);
  }

  cfg.out_dir = j.value("out_dir", "");
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(const std::string& json_text) {
  const std::string canon = json::parse(json_text).dump();
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace socs
