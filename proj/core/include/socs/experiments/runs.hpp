#pragma once

#include "socs/experiments/config.hpp"
#include "socs/experiments/outputs.hpp"
#include "socs/packet.hpp"
#include "socs/split_operator.hpp"

namespace socs {

/// Exactness of the classically propagated packet for globally quadratic H0
/// with a constant field (rejects other models); PASS iff the maximal
/// deviation from the grid solver stays below 1e-6, including the global
/// phase and the Maslov sign.
ExperimentOutcome run_quadratic_exactness(const ExperimentConfig& cfg);

/// sqrt(hbar) error scaling in scenario A (hbar -> 0, s fixed):
/// log-log slope of the deviation against hbar within [0.35, 0.65].
ExperimentOutcome run_scaling_a(const ExperimentConfig& cfg);

/// sqrt(hbar) error scaling in scenario B (hbar = S/s, s -> infinity), plus
/// the spin-branch separation check against the coupled classical flow.
ExperimentOutcome run_scaling_b(const ExperimentConfig& cfg);

/// Breakdown time t*(hbar) sweep: first crossing of the error threshold,
/// compared with the (1/6 lambda) |log hbar| Ehrenfest scale.
ExperimentOutcome run_ehrenfest_sweep(const ExperimentConfig& cfg);

/// Expectation-value tracking: <x>, <p>, <S>/hbar against the classical
/// trajectory, with a C sqrt(hbar) envelope fitted on the two largest hbar
/// and validated on the smallest.
ExperimentOutcome run_expectation_tracking(const ExperimentConfig& cfg);

/// Dispatch by CLI subcommand name: "exactness", "scaling-a", "scaling-b",
/// "ehrenfest", "expectation".
ExperimentOutcome run_experiment(const std::string& name, const ExperimentConfig& cfg);

/// Position-grid plan derived from the classical envelope of a packet run.
struct GridPlan {
  GridAxis axis;
  bool feasible = false;
  double xi_need = 0.0;
  double energy_scale = 0.0;
};

GridPlan plan_grid(const SpinOrbitModel& model, const PacketPropagation& coarse, double hbar,
                   double spin_s, double pad_sigma, int n_max, double safety = 1.3);

} // namespace socs
