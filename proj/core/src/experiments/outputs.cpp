#include "socs/experiments/outputs.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace socs {

using nlohmann::json;

bool ExperimentOutcome::pass() const {
  for (const auto& c : criteria) {
    if (!c.pass) return false;
  }
  return true;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Render log-log error curves from results.csv (written next to this file)."""
import csv
import os
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, "results.csv"))))
if not rows:
    raise SystemExit("results.csv is empty")

by_run = defaultdict(list)
for r in rows:
    by_run[r["run_id"]].append(r)

fig, (ax_t, ax_h) = plt.subplots(1, 2, figsize=(11, 4.5))

for run, rs in sorted(by_run.items()):
    ts = [float(r["t"]) for r in rs]
    es = [float(r["error_norm"]) for r in rs]
    ax_t.plot(ts, es, marker=".", label=run)
ax_t.set_xlabel("t")
ax_t.set_ylabel("error norm")
ax_t.set_yscale("log")
ax_t.legend(fontsize=6)
ax_t.set_title("error growth in time")

final = defaultdict(dict)
for r in rows:
    final[r["run_id"]][float(r["t"])] = (float(r["hbar"]), float(r["error_norm"]))
hs, es = [], []
for run, data in final.items():
    t_last = max(data)
    h, e = data[t_last]
    if e > 0:
        hs.append(h)
        es.append(e)
if hs:
    ax_h.loglog(hs, es, "o")
    ax_h.set_xlabel("hbar")
    ax_h.set_ylabel("error norm at final t")
    ax_h.set_title("scaling against hbar")

fig.tight_layout()
out = os.path.join(here, "results.png")
fig.savefig(out, dpi=150)
print("wrote", out)
)PY";

} // namespace

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = "run_id,model,scenario,hbar,s,t,error_norm,theta,delta\n";
  for (const auto& r : rows) {
    out += r.run_id;
    out += ',';
    out += r.model;
    out += ',';
    out += r.scenario;
    out += ',';
    out += fmt(r.hbar) + ',' + fmt(r.s) + ',' + fmt(r.t) + ',' + fmt(r.error_norm) + ',' +
           fmt(r.theta) + ',' + fmt(r.delta) + '\n';
  }
  return out;
}

void emit_outputs(const ExperimentOutcome& outcome, const std::string& config_hash_hex,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error("emit_outputs: cannot create '" + out_dir + "': " + ec.message());

  {
    std::ofstream csv(fs::path(out_dir) / "results.csv", std::ios::binary);
    if (!csv) throw Error("emit_outputs: cannot write results.csv");
    csv << format_csv(outcome.rows);
  }

  json summary;
  summary["experiment"] = outcome.experiment;
  summary["config_hash"] = config_hash_hex;
  summary["pass"] = outcome.pass();
  summary["criteria"] = json::array();
  for (const auto& c : outcome.criteria) {
    json jc;
    jc["name"] = c.name;
    jc["measured"] = c.measured;
    if (std::isfinite(c.bound_lo)) jc["bound_lo"] = c.bound_lo;
    if (std::isfinite(c.bound_hi)) jc["bound_hi"] = c.bound_hi;
    jc["pass"] = c.pass;
    if (!c.note.empty()) jc["note"] = c.note;
    summary["criteria"].push_back(jc);
  }
  summary["warnings"] = outcome.warnings;
  if (!outcome.summary_extra_json.empty()) {
    summary["details"] = json::parse(outcome.summary_extra_json);
  }
  {
    std::ofstream js(fs::path(out_dir) / "summary.json", std::ios::binary);
    if (!js) throw Error("emit_outputs: cannot write summary.json");
    js << summary.dump(2) << '\n';
  }
  {
    std::ofstream py(fs::path(out_dir) / "plot_results.py", std::ios::binary);
    if (!py) throw Error("emit_outputs: cannot write plot_results.py");
    py << kPlotScript;
  }
}

} // namespace socs
