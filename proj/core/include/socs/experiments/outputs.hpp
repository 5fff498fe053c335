#pragma once

#include <string>
#include <vector>

#include "socs/types.hpp"

namespace socs {

/// One CSV row of the fixed schema
/// run_id, model, scenario, hbar, s, t, error_norm, theta, delta.
struct ResultRow {
  std::string run_id;
  std::string model;
  char scenario = 'A';
  double hbar = 0.0;
  double s = 0.0;
  double t = 0.0;
  double error_norm = 0.0;
  double theta = 0.0;
  double delta = 0.0;
};

/// One PASS/FAIL entry of the summary: measured value against its bound.
struct CriterionResult {
  std::string name;
  double measured = 0.0;
  double bound_lo = -std::numeric_limits<double>::infinity();
  double bound_hi = std::numeric_limits<double>::infinity();
  bool pass = false;
  std::string note;
};

struct ExperimentOutcome {
  std::string experiment;
  std::vector<ResultRow> rows;
  std::vector<CriterionResult> criteria;
  std::vector<std::string> warnings;
  std::string summary_extra_json; // experiment-specific payload (JSON object text)

  bool pass() const;
};

/// Writes results.csv, summary.json and plot_results.py into out_dir.
/// Deterministic: fixed float formatting, sorted keys, no timestamps.
void emit_outputs(const ExperimentOutcome& outcome, const std::string& config_hash_hex,
                  const std::string& out_dir);

std::string format_csv(const std::vector<ResultRow>& rows);

} // namespace socs
