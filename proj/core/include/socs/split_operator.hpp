#pragma once

#include <memory>
#include <vector>

#include "socs/grid.hpp"
#include "socs/model.hpp"
#include "socs/spin_rep.hpp"

namespace socs {

struct PropagatorConfig {
  double dt = 1e-3;
  double tail_threshold = 1e-10;
  /// Steps between wrap-around checks; 0 picks ~128 checks per run.
  int check_interval = 0;
};

/// Strang-split reference propagator for Hamiltonians of the exact form
/// H0 = xi^2/(2m) + V(x), C = C(x):
///   exp(-i dt K / 2 hbar) exp(-i dt (V + C.S_hat) / hbar) exp(-i dt K / 2 hbar)
/// with the kinetic factor applied as a Fourier multiplier and the
/// potential-spin factor as a cached per-point matrix exponential.
/// Each factor is unitary to round-off.
class SplitStepPropagator {
public:
  SplitStepPropagator(std::shared_ptr<const SpinOrbitModel> model, const Grid& grid, double hbar,
                      int two_s, PropagatorConfig config);
  ~SplitStepPropagator();

  SplitStepPropagator(const SplitStepPropagator&) = delete;
  SplitStepPropagator& operator=(const SplitStepPropagator&) = delete;

  /// Evolves to t_final (steps of ~config.dt, adjusted so an integer number
  /// of steps lands exactly).  Aborts if tail mass exceeds the threshold at a
  /// checkpoint.
  GridState propagate(const GridState& initial, double t_final) const;

  /// States at the requested (sorted, nonnegative) times; index 0 of `times`
  /// may be 0 to include the initial state.
  std::vector<GridState> propagate_series(const GridState& initial,
                                          const std::vector<double>& times) const;

  const PropagatorConfig& config() const { return config_; }

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  PropagatorConfig config_;
};

/// One-shot convenience wrapper around SplitStepPropagator.
GridState split_step(std::shared_ptr<const SpinOrbitModel> model, const GridState& state,
                     const PropagatorConfig& config, double t_final);

struct ObservableRecord {
  Vec x_mean;      // <x_hat> per axis
  Vec p_mean;      // <p_hat> per axis
  Vec3 spin_mean;  // <S_hat>/hbar
  double energy = 0.0;
};

/// Position by grid quadrature, momentum via the Fourier multiplier, spin by
/// contraction with the generators, energy by one Hamiltonian application.
ObservableRecord observables(const GridState& state,
                             std::shared_ptr<const SpinOrbitModel> model);

} // namespace socs
