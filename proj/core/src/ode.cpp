#include "socs/ode.hpp"

#include <algorithm>
#include <cmath>

namespace socs {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (5th minus embedded 4th order weights), including the k7 stage.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

} // namespace

void integrate_ode(const OdeRhs& rhs, Vec& y, double t0, double t1, const OdeOptions& opts,
                   int err_dims, const std::function<void(double, Vec&)>& post_step,
                   const std::function<void(double, const Vec&)>& observer,
                   const std::vector<double>& forced_times) {
  if (t1 < t0) throw Error("integrate_ode: backward integration not supported");
  const int n = static_cast<int>(y.size());
  const int m = (err_dims <= 0 || err_dims > n) ? n : err_dims;

  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
  double t = t0;
  double dt = std::min(opts.dt_initial, opts.dt_max);
  size_t forced_idx = 0;
  while (forced_idx < forced_times.size() && forced_times[forced_idx] <= t0 + 1e-14) {
    ++forced_idx;
  }

  if (observer) observer(t, y);
  if (t1 <= t0) return;

  long steps = 0;
  while (t < t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
    if (++steps > opts.max_steps) throw Error("integrate_ode: step budget exhausted");

    double dt_cap = std::min(dt, opts.dt_max);
    double next_stop = t1;
    if (forced_idx < forced_times.size()) next_stop = std::min(next_stop, forced_times[forced_idx]);
    bool hits_stop = false;
    if (t + dt_cap >= next_stop - 1e-14 * std::max(1.0, std::abs(next_stop))) {
      dt_cap = next_stop - t;
      hits_stop = true;
    }
    const double h = dt_cap;
    if (!hits_stop && h < opts.dt_min) {
      throw Error("integrate_ode: step size underflow at t=" + std::to_string(t));
    }

    rhs(t, y, k1);
    ytmp = y + h * (a21 * k1);
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);

    double err_sq = 0.0;
    for (int i = 0; i < m; ++i) {
      const double err_i = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                e7 * k7[i]);
      const double scale = opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err_sq += (err_i / scale) * (err_i / scale);
    }
    const double err = std::sqrt(err_sq / m);

    if (err <= 1.0 || h <= opts.dt_min * 1.0001) {
      const double t_new = hits_stop ? next_stop : t + h;
      t = t_new;
      y = ynew;
      if (post_step) post_step(t, y);
      if (observer) observer(t, y);
      if (hits_stop && forced_idx < forced_times.size() &&
          std::abs(next_stop - forced_times[forced_idx]) <= 1e-14 * std::max(1.0, std::abs(next_stop))) {
        ++forced_idx;
      }
    }
    const double factor =
        (err <= 1e-30) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    dt = std::min(h * factor, opts.dt_max);
    dt = std::max(dt, opts.dt_min);
  }
}

} // namespace socs
