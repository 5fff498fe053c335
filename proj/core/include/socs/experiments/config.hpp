#pragma once

#include <string>
#include <vector>

#include "socs/model.hpp"
#include "socs/types.hpp"

namespace socs {

struct QuantumSettings {
  double dt = 0.0;            // 0: choose from the energy scale
  int n_max = 4096;           // hard cap on grid points per axis
  double tail_threshold = 1e-10;
  double pad_sigma = 10.0;    // half-width margin in packet standard deviations
  bool auto_grid = true;
  double x_min = 0.0, x_max = 0.0; // manual grid when auto_grid = false
  int n = 0;
};

struct ClassicalSettings {
  double rtol = 1e-10;
  double atol = 1e-10;
  double dt_max = 0.02;
};

struct EhrenfestSettings {
  double threshold = 0.1;      // error_norm level defining the breakdown time
  std::string regime = "hyperbolic";
  double lyapunov_time = 40.0; // window for the exponent estimate
};

/// Parsed experiment configuration (one JSON document; unknown keys rejected).
struct ExperimentConfig {
  ModelId model;
  char scenario = 'A';

  std::vector<double> hbar_list; // scenario A
  double S = 0.0;                // scenario B: fixed classical spin
  std::vector<double> s_list;    // scenario B: spin quantum numbers, hbar = S/s

  double s = 0.5; // scenario A spin quantum number

  Vec q0, p0;
  CMat B0;
  Vec3 n0 = Vec3(0, 0, 1);

  double t_final = 1.0;
  int t_samples = 8;
  std::vector<double> t_grid; // overrides (t_final, t_samples) when nonempty

  QuantumSettings quantum;
  ClassicalSettings classical;
  EhrenfestSettings ehrenfest;

  std::string out_dir;

  std::vector<double> times() const;
  /// hbar values this config sweeps (S/s for scenario B).
  std::vector<double> hbars() const;
  /// Spin quantum number for the given sweep index.
  double spin_of(size_t index) const;
};

/// Parses and validates; throws Error with a precise message on unknown keys,
/// missing fields or inconsistent scenario data.
ExperimentConfig parse_config(const std::string& json_text);

ExperimentConfig load_config_file(const std::string& path);

/// FNV-1a hash of the canonical (sorted-key) form of the document.
std::string config_hash(const std::string& json_text);

} // namespace socs
