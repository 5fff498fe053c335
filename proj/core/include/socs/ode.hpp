#pragma once

#include <functional>
#include <vector>

#include "socs/types.hpp"

namespace socs {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-10;
  double dt_initial = 1e-3;
  double dt_max = 0.05;
  double dt_min = 1e-14;
  long max_steps = 100'000'000;
};

using OdeRhs = std::function<void(double t, const Vec& y, Vec& dydt)>;

/// Adaptive Dormand-Prince 5(4) driver.
///
/// err_dims: number of leading state components entering the error norm
/// (0 selects all).  Components beyond err_dims are transported with the same
/// steps but do not influence step-size control, so e.g. a skew-product base
/// trajectory takes bit-identical steps whether or not fibre blocks ride along.
///
/// post_step may project invariants (renormalizations) on the accepted state;
/// observer is called at t0 and after every accepted (and projected) step.
/// forced_times must be sorted and within (t0, t1]; steps land on them exactly.
void integrate_ode(const OdeRhs& rhs, Vec& y, double t0, double t1, const OdeOptions& opts,
                   int err_dims, const std::function<void(double, Vec&)>& post_step,
                   const std::function<void(double, const Vec&)>& observer,
                   const std::vector<double>& forced_times = {});

} // namespace socs
