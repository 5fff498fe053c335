#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "socs/model.hpp"
#include "socs/spin_coherent.hpp"
#include "socs/types.hpp"

namespace socs {

/// Which classical limit drives the flow.
///   skew:       z by H0 alone, spin precessing along (no back-reaction)
///   spin_orbit: coupled flow of H_so = H0 + S n.C on T*R^d x S^2
struct FlowKind {
  enum Kind { skew, spin_orbit };
  Kind kind = skew;
  double S = 0.0; // classical spin length, used only by spin_orbit

  static FlowKind make_skew() { return {skew, 0.0}; }
  static FlowKind make_spin_orbit(double S);
};

struct TrajectorySample {
  double t = 0.0;
  Vec z;             // (q, p) in R^{2d}
  Vec3 n;            // unit spin direction
  Su2 g;             // SU(2) spin transport, g(0) = Id
  Mat S_mat;         // 2d x 2d monodromy (rescaled; see log_scale)
  double log_scale = 0.0; // true monodromy = exp(log_scale) * S_mat
  double action = 0.0;    // int_0^t (p qdot - H0) dt'
  double rho = 0.0;       // spinor-extracted spin angle, unwrapped; NaN off-chart
  double rho_quad = 0.0;  // chart quadrature of the same angle
  double energy = 0.0;    // H0 (skew) or H_so (spin_orbit)

  double log_mono_norm() const { return log_scale + std::log(S_mat.norm()); }
};

struct TrajectoryDiagnostics {
  double max_energy_drift = 0.0;       // relative to 1 + |E(0)|
  double max_symplectic_defect = 0.0;  // max-norm of S^T J S - J (unscaled samples only)
  double max_n_defect = 0.0;           // | |n| - 1 | before renormalization
  double min_pole_margin = std::numeric_limits<double>::infinity(); // min(theta, pi - theta)
  double min_cos_half_theta = std::numeric_limits<double>::infinity(); // |v1| of the transported spinor
  long n_accepted = 0;
};

struct TrajectoryOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  // Also caps the truncation error of the transported fibre blocks (spin,
  // monodromy), which ride along outside the step controller's error norm.
  double dt_max = 0.02;
  double dt_initial = 1e-3;
  /// Rescale the monodromy to unit HS norm every so often (Benettin-style
  /// log accumulation); 0 keeps the raw matrix.
  double renorm_interval = 0.0;
  bool integrate_spin_block = true;
  /// Abort if |n| drifts from 1 by more than this within a step.
  double n_drift_abort = 1e-8;
  /// Steps land exactly on these times (sorted) so samples exist there.
  std::vector<double> sample_times;
};

class TrajectoryBundle {
public:
  FlowKind kind;
  std::shared_ptr<const SpinOrbitModel> model;
  std::vector<TrajectorySample> samples;
  TrajectoryDiagnostics diag;

  double t_final() const { return samples.empty() ? 0.0 : samples.back().t; }
  const TrajectorySample& front() const { return samples.front(); }
  const TrajectorySample& back() const { return samples.back(); }
  /// Sample at time t (must exist within 1e-9; request via sample_times).
  const TrajectorySample& at_time(double t) const;
  bool rho_chart_valid() const { return diag.min_pole_margin > 1e-3; }
};

/// Integrates the chosen flow together with the variational equation
/// dS/dt = J H'' S, the SU(2) spin transport, the translational action and
/// the chart quadrature of the spin angle.  n and g are renormalized after
/// every accepted step.
TrajectoryBundle integrate_flow(std::shared_ptr<const SpinOrbitModel> model, FlowKind kind,
                                const Vec& z0, const SpinDirection& n0, double t_final,
                                const TrajectoryOptions& opts = {});

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> v;
};

/// rho(t) = -int (C.n + (1 - cos theta) phidot) dt', valid only when the
/// trajectory stays away from both poles by more than 1e-3 rad; otherwise
/// throws (use the spinor-extracted rho instead).
TimeSeries rho_via_quadrature(const TrajectoryBundle& traj);

/// R_so(t) = int (p qdot - H0) dt' + S rho(t), the spin-orbit principal
/// function along a spin_orbit trajectory.
TimeSeries spin_orbit_action(const TrajectoryBundle& traj, double S);

/// theta(t) = max(1, sup_{t'<=t} ||S(t')||_HS), delta(t) = sup_{t'<=t} (1+|z|).
std::pair<TimeSeries, TimeSeries> theta_delta(const TrajectoryBundle& traj);

/// Largest Lyapunov (or stability) exponent estimate
/// (1/2t) log tr(S^T S), averaged over the final third of the time window.
double lyapunov_max(const TrajectoryBundle& traj);

/// sup over trajectory samples of || Hess_w H_so(w, n) ||_HS; finite bounds
/// certify finite Lyapunov exponents.
double hessian_bound_scan(const SpinOrbitModel& model, const TrajectoryBundle& traj, double S);

enum class EhrenfestRegime { hyperbolic, kam, kam_degenerate };

/// Ehrenfest time scale: (1/(6 lambda)) |log hbar| for hyperbolic trajectories,
/// hbar^{-1/8} on a KAM torus, hbar^{-1/2} in the degenerate case (C = 1).
double ehrenfest_time(double lambda_max, double hbar, EhrenfestRegime regime);

} // namespace socs
