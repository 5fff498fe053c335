#include "socs/flows.hpp"

#include <algorithm>
#include <cmath>

#include "socs/ode.hpp"

namespace socs {

FlowKind FlowKind::make_spin_orbit(double S) {
  if (S <= 0.0) throw Error("FlowKind: spin_orbit requires spin length S > 0");
  return {spin_orbit, S};
}

namespace {

// State layout: [ z (2d) | n (3) | g (4) | S row-major (4d^2) | action | rho_quad ]
struct Layout {
  int d;
  int nz() const { return 2 * d; }
  int in() const { return 2 * d; }
  int ig() const { return 2 * d + 3; }
  int iS() const { return 2 * d + 7; }
  int ia() const { return 2 * d + 7 + 4 * d * d; }
  int ir() const { return ia() + 1; }
  int size() const { return ir() + 1; }
};

Vec3 get_n(const Vec& y, const Layout& L) { return y.segment<3>(L.in()); }

Su2 get_g(const Vec& y, const Layout& L) {
  Su2 g;
  g.a0 = y[L.ig()];
  g.a = y.segment<3>(L.ig() + 1);
  return g;
}

Eigen::Map<const Mat> get_S(const Vec& y, const Layout& L) {
  return Eigen::Map<const Mat>(y.data() + L.iS(), L.nz(), L.nz());
}

} // namespace

const TrajectorySample& TrajectoryBundle::at_time(double t) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), t - 1e-9,
                             [](const TrajectorySample& s, double v) { return s.t < v; });
  if (it == samples.end() || std::abs(it->t - t) > 1e-9) {
    throw Error("TrajectoryBundle::at_time: no sample at t=" + std::to_string(t) +
                " (request it via TrajectoryOptions::sample_times)");
  }
  return *it;
}

TrajectoryBundle integrate_flow(std::shared_ptr<const SpinOrbitModel> model, FlowKind kind,
                                const Vec& z0, const SpinDirection& n0, double t_final,
                                const TrajectoryOptions& opts) {
  if (!model) throw Error("integrate_flow: null model");
  if (kind.kind == FlowKind::spin_orbit && kind.S <= 0.0) {
    throw Error("integrate_flow: spin_orbit flow requires S > 0");
  }
  const Layout L{model->dim()};
  if (z0.size() != L.nz()) throw Error("integrate_flow: z0 has wrong dimension");

  const bool coupled = kind.kind == FlowKind::spin_orbit;
  const double S_len = kind.S;
  const bool spin_on = opts.integrate_spin_block || coupled;

  Vec y = Vec::Zero(L.size());
  y.head(L.nz()) = z0;
  y.segment<3>(L.in()) = n0.n();
  y[L.ig()] = 1.0; // g = identity
  Eigen::Map<Mat>(y.data() + L.iS(), L.nz(), L.nz()) = Mat::Identity(L.nz(), L.nz());

  const int d = L.d;
  const auto rhs = [&](double, const Vec& yy, Vec& dy) {
    dy.setZero();
    const Vec z = yy.head(L.nz());
    const Vec3 n = get_n(yy, L);

    const Vec grad = coupled ? grad_h_so(*model, z, n, S_len) : model->grad_h0(z);
    // Hamiltonian vector field: qdot = dH/dxi, pdot = -dH/dx.
    dy.head(d) = grad.tail(d);
    dy.segment(d, d) = -grad.head(d);

    if (spin_on) {
      const Vec3 C = model->C(z);
      dy.segment<3>(L.in()) = C.cross(n);
      // Quaternion form of gdot = -(i/2) C.sigma g.
      const double a0 = yy[L.ig()];
      const Vec3 a = yy.segment<3>(L.ig() + 1);
      dy[L.ig()] = -0.5 * C.dot(a);
      dy.segment<3>(L.ig() + 1) = 0.5 * (a0 * C + C.cross(a));
      // Chart quadrature of the spin angle.
      const Vec3 ndot = C.cross(n);
      const double den = std::max(n[0] * n[0] + n[1] * n[1], 1e-300);
      const double phidot = (n[0] * ndot[1] - n[1] * ndot[0]) / den;
      dy[L.ir()] = -(C.dot(n) + (1.0 - n[2]) * phidot);
    }

    const Mat hess = coupled ? hess_h_so(*model, z, n, S_len) : model->hess_h0(z);
    // dS/dt = J H'' S with J = [[0, I], [-I, 0]].
    const auto Smat = get_S(yy, L);
    Eigen::Map<Mat> dS(dy.data() + L.iS(), L.nz(), L.nz());
    const Mat hs = hess * Smat;
    dS.topRows(d) = hs.bottomRows(d);
    dS.bottomRows(d) = -hs.topRows(d);

    // action: p . qdot - H0.
    dy[L.ia()] = z.tail(d).dot(dy.head(d)) - model->h0(z);
  };

  TrajectoryBundle bundle;
  bundle.kind = kind;
  bundle.model = model;

  const double E0 = coupled ? eval_h_so(*model, z0, n0, S_len) : model->h0(z0);

  // Forced stops: user sample times plus monodromy renormalization times.
  std::vector<double> stops = opts.sample_times;
  if (opts.renorm_interval > 0.0) {
    for (double tr = opts.renorm_interval; tr < t_final + 1e-12; tr += opts.renorm_interval) {
      stops.push_back(tr);
    }
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              stops.end());

  double log_scale = 0.0;
  double next_renorm = opts.renorm_interval > 0.0 ? opts.renorm_interval
                                                  : std::numeric_limits<double>::infinity();
  double rho_prev = 0.0;
  bool rho_valid = true;
  const double theta0 = n0.theta();
  const double phi0 = n0.phi();
  const cplx chi0_1 = std::cos(0.5 * theta0);
  const cplx chi0_2 = std::sin(0.5 * theta0) * std::exp(cplx(0.0, phi0));
  const Mat J = symplectic_form(d);

  const auto post_step = [&](double t, Vec& yy) {
    if (spin_on) {
      const double n_norm = yy.segment<3>(L.in()).norm();
      const double defect = std::abs(n_norm - 1.0);
      bundle.diag.max_n_defect = std::max(bundle.diag.max_n_defect, defect);
      if (defect > opts.n_drift_abort) {
        throw Error("integrate_flow: |n| drifted by " + std::to_string(defect) +
                    " in one step; tolerance aborted");
      }
      yy.segment<3>(L.in()) /= n_norm;
      // Project g back to SU(2).
      const double g_norm = std::sqrt(yy[L.ig()] * yy[L.ig()] +
                                      yy.segment<3>(L.ig() + 1).squaredNorm());
      yy[L.ig()] /= g_norm;
      yy.segment<3>(L.ig() + 1) /= g_norm;
    }
    if (t >= next_renorm - 1e-12) {
      Eigen::Map<Mat> Smat(yy.data() + L.iS(), L.nz(), L.nz());
      const double norm = Smat.norm();
      if (norm > 0.0) {
        Smat /= norm;
        log_scale += std::log(norm);
      }
      next_renorm += opts.renorm_interval;
    }
  };

  const auto observer = [&](double t, const Vec& yy) {
    TrajectorySample s;
    s.t = t;
    s.z = yy.head(L.nz());
    s.n = get_n(yy, L).normalized();
    s.g = get_g(yy, L);
    s.S_mat = get_S(yy, L);
    s.log_scale = log_scale;
    s.action = yy[L.ia()];
    s.rho_quad = yy[L.ir()];
    s.energy = coupled ? model->h0(s.z) + S_len * s.n.dot(model->C(s.z)) : model->h0(s.z);

    // Spinor-extracted angle: rho = 2 arg(v1) of v = g(t) chi(n0), unwrapped.
    const Mat2c gm = s.g.matrix();
    const cplx v1 = gm(0, 0) * chi0_1 + gm(0, 1) * chi0_2;
    bundle.diag.min_cos_half_theta = std::min(bundle.diag.min_cos_half_theta, std::abs(v1));
    if (rho_valid && std::abs(v1) > 1e-6) {
      const double raw = 2.0 * std::arg(v1);
      const double k = std::round((rho_prev - raw) / (4.0 * pi));
      s.rho = raw + 4.0 * pi * k;
      rho_prev = s.rho;
    } else {
      rho_valid = false;
      s.rho = std::numeric_limits<double>::quiet_NaN();
    }

    const double theta = std::atan2(std::hypot(s.n[0], s.n[1]), s.n[2]);
    bundle.diag.min_pole_margin =
        std::min(bundle.diag.min_pole_margin, std::min(theta, pi - theta));
    bundle.diag.max_energy_drift = std::max(
        bundle.diag.max_energy_drift, std::abs(s.energy - E0) / (1.0 + std::abs(E0)));
    if (log_scale == 0.0) {
      bundle.diag.max_symplectic_defect = std::max(
          bundle.diag.max_symplectic_defect, max_abs(s.S_mat.transpose() * J * s.S_mat - J));
    }
    ++bundle.diag.n_accepted;
    bundle.samples.push_back(std::move(s));
  };

  OdeOptions oo;
  oo.rtol = opts.rtol;
  oo.atol = opts.atol;
  oo.dt_max = opts.dt_max;
  oo.dt_initial = opts.dt_initial;
  // Step control follows the flow variables; the (linear) variational and
  // transport blocks inherit the base resolution.  For the skew product this
  // keeps z bit-identical with or without the spin block.
  const int err_dims = coupled ? L.nz() + 3 : L.nz();
  integrate_ode(rhs, y, 0.0, t_final, oo, err_dims, post_step, observer, stops);

  return bundle;
}

TimeSeries rho_via_quadrature(const TrajectoryBundle& traj) {
  if (!traj.rho_chart_valid()) {
    throw Error("rho_via_quadrature: trajectory approaches a coordinate pole (margin " +
                std::to_string(traj.diag.min_pole_margin) +
                " rad <= 1e-3); use the spinor-extracted rho instead");
  }
  TimeSeries out;
  out.t.reserve(traj.samples.size());
  out.v.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    out.t.push_back(s.t);
    out.v.push_back(s.rho_quad);
  }
  return out;
}

TimeSeries spin_orbit_action(const TrajectoryBundle& traj, double S) {
  TimeSeries out;
  out.t.reserve(traj.samples.size());
  out.v.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    double value = s.action;
    if (S != 0.0) {
      if (!std::isfinite(s.rho)) {
        throw Error("spin_orbit_action: spin angle invalid along this trajectory");
      }
      value += S * s.rho;
    }
    out.t.push_back(s.t);
    out.v.push_back(value);
  }
  return out;
}

std::pair<TimeSeries, TimeSeries> theta_delta(const TrajectoryBundle& traj) {
  TimeSeries theta, delta;
  double sup_s = 1.0;
  double sup_z = 0.0;
  for (const auto& s : traj.samples) {
    sup_s = std::max(sup_s, std::exp(s.log_scale) * s.S_mat.norm());
    sup_z = std::max(sup_z, 1.0 + s.z.norm());
    theta.t.push_back(s.t);
    theta.v.push_back(sup_s);
    delta.t.push_back(s.t);
    delta.v.push_back(sup_z);
  }
  return {theta, delta};
}

double lyapunov_max(const TrajectoryBundle& traj) {
  if (traj.samples.size() < 8) throw Error("lyapunov_max: trajectory too short");
  const double T = traj.t_final();
  double sum = 0.0;
  long count = 0;
  for (const auto& s : traj.samples) {
    if (s.t < 2.0 * T / 3.0 || s.t <= 0.0) continue;
    sum += s.log_mono_norm() / s.t;
    ++count;
  }
  if (count == 0) throw Error("lyapunov_max: no samples in the averaging window");
  return sum / count;
}

double hessian_bound_scan(const SpinOrbitModel& model, const TrajectoryBundle& traj, double S) {
  if (traj.samples.size() < 2) throw Error("hessian_bound_scan: need at least 2 samples");
  double sup = 0.0;
  for (const auto& s : traj.samples) {
    sup = std::max(sup, hs_norm(hess_h_so(model, s.z, s.n, S)));
  }
  return sup;
}

double ehrenfest_time(double lambda_max, double hbar, EhrenfestRegime regime) {
  if (hbar <= 0.0 || hbar > 1.0) throw Error("ehrenfest_time: hbar must lie in (0, 1]");
  switch (regime) {
    case EhrenfestRegime::hyperbolic:
      if (lambda_max <= 0.0) {
        throw Error("ehrenfest_time: hyperbolic regime requires lambda_max > 0");
      }
      return std::abs(std::log(hbar)) / (6.0 * lambda_max);
    case EhrenfestRegime::kam:
      return std::pow(hbar, -1.0 / 8.0);
    case EhrenfestRegime::kam_degenerate:
      return std::pow(hbar, -0.5);
  }
  throw Error("ehrenfest_time: unknown regime");
}

} // namespace socs
