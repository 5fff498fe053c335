#include "socs/split_operator.hpp"

#include <cmath>

#include <fftw3.h>

namespace socs {

namespace {

struct FftPlans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  FftPlans(const Grid& grid, int howmany, cplx* data) {
    const int rank = grid.dim();
    int n[2] = {0, 0};
    // FFTW is row-major with the last dimension contiguous; our flat index
    // runs axis 0 fastest.
    for (int a = 0; a < rank; ++a) n[a] = grid.axis(rank - 1 - a).n;
    const int np = static_cast<int>(grid.num_points());
    auto* ptr = reinterpret_cast<fftw_complex*>(data);
    fwd = fftw_plan_many_dft(rank, n, howmany, ptr, nullptr, 1, np, ptr, nullptr, 1, np,
                             FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_many_dft(rank, n, howmany, ptr, nullptr, 1, np, ptr, nullptr, 1, np,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!fwd || !bwd) throw Error("SplitStepPropagator: FFTW planning failed");
  }
  ~FftPlans() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

double kinetic_energy_at(const Grid& grid, long flat, double hbar, double mass) {
  double k2 = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const double xi = grid.momentum(a, grid.index_along(a, flat), hbar);
    k2 += xi * xi;
  }
  return 0.5 * k2 / mass;
}

/// Fraction of |psi_hat|^2 in the highest-|xi| band (aliasing sentinel).
double momentum_band_fraction(const Grid& grid, const CMat& psik, int cells) {
  double band = 0.0;
  const double total = psik.squaredNorm();
  for (long i = 0; i < grid.num_points(); ++i) {
    bool near_cutoff = false;
    for (int a = 0; a < grid.dim(); ++a) {
      const int n = grid.axis(a).n;
      const int j = grid.index_along(a, i);
      if (std::abs(j - n / 2) <= cells) near_cutoff = true;
    }
    if (near_cutoff) band += psik.row(i).squaredNorm();
  }
  return total > 0.0 ? band / total : 0.0;
}

} // namespace

struct SplitStepPropagator::Impl {
  std::shared_ptr<const SpinOrbitModel> model;
  Grid grid;
  double hbar;
  int two_s;
  SpinRep rep;
  double tail_threshold;

  // Per-point diagonalization of C(x).S (shared single entry when C const).
  bool c_constant = false;
  std::vector<CMat> eigvecs; // U with C.S = U diag(lambda) U^+
  std::vector<Vec> eigvals;
  Vec potential;  // V(x_i)
  Vec cnorm;      // |C(x_i)|

  // dt-dependent caches.
  double cached_dt = -1.0;
  CVec kin_full, kin_half;     // exp(-i dt K / hbar), exp(-i dt K / 2 hbar)
  CVec pot_phase;              // exp(-i dt V(x) / hbar)
  CMat spin_rot_const;         // constant-C rotation for the cached dt

  mutable CMat work;
  std::unique_ptr<FftPlans> plans;

  Impl(std::shared_ptr<const SpinOrbitModel> m, const Grid& g, double hb, int ts,
       double tail)
      : model(std::move(m)),
        grid(g),
        hbar(hb),
        two_s(ts),
        rep(0.5 * ts),
        tail_threshold(tail) {
    if (!model->split_form()) {
      throw Error("SplitStepPropagator: model must have H0 = xi^2/2m + V(x)");
    }
    if (!model->x_only_C()) {
      throw Error("SplitStepPropagator: C must depend on x only");
    }
    const long np = grid.num_points();
    const int d = grid.dim();
    if (model->dim() != d) throw Error("SplitStepPropagator: grid/model dimension mismatch");

    potential.resize(np);
    cnorm.resize(np);
    c_constant = model->constant_C();
    Vec w = Vec::Zero(2 * d);
    const long n_eig = c_constant ? 1 : np;
    eigvecs.resize(n_eig);
    eigvals.resize(n_eig);
    for (long i = 0; i < np; ++i) {
      for (int a = 0; a < d; ++a) w[a] = grid.coord(a, i);
      potential[i] = model->potential(w.head(d));
      const Vec3 c = model->C(w);
      cnorm[i] = c.norm();
      if (!c_constant || i == 0) {
        const long slot = c_constant ? 0 : i;
        if (cnorm[i] > 0.0) {
          Eigen::SelfAdjointEigenSolver<CMat> es(rep.dot(c / cnorm[i]));
          eigvecs[slot] = es.eigenvectors();
          eigvals[slot] = es.eigenvalues();
        } else {
          eigvecs[slot] = CMat::Identity(rep.dim(), rep.dim());
          eigvals[slot] = Vec::Zero(rep.dim());
        }
      }
    }
    work.resize(np, rep.dim());
    plans = std::make_unique<FftPlans>(grid, rep.dim(), work.data());
  }

  void set_dt(double dt) {
    if (dt == cached_dt) return;
    cached_dt = dt;
    const long np = grid.num_points();
    kin_full.resize(np);
    kin_half.resize(np);
    pot_phase.resize(np);
    const double mass = model->mass();
    for (long i = 0; i < np; ++i) {
      const double k = kinetic_energy_at(grid, i, hbar, mass);
      kin_full[i] = std::exp(cplx(0.0, -dt * k / hbar));
      kin_half[i] = std::exp(cplx(0.0, -0.5 * dt * k / hbar));
      pot_phase[i] = std::exp(cplx(0.0, -dt * potential[i] / hbar));
    }
    if (c_constant) {
      CVec ph(rep.dim());
      for (int j = 0; j < rep.dim(); ++j) {
        ph[j] = std::exp(cplx(0.0, -dt * cnorm[0] * eigvals[0][j]));
      }
      spin_rot_const = eigvecs[0] * ph.asDiagonal() * eigvecs[0].adjoint();
    }
  }

  void apply_potential(CMat& psi, double dt) const {
    const long np = grid.num_points();
    if (c_constant) {
      psi = pot_phase.asDiagonal() * psi;
      if (cnorm[0] > 0.0) psi = psi * spin_rot_const.transpose();
      return;
    }
    CVec v(rep.dim()), tmp(rep.dim());
    for (long i = 0; i < np; ++i) {
      v = psi.row(i).transpose();
      tmp = eigvecs[i].adjoint() * v;
      for (int j = 0; j < rep.dim(); ++j) {
        tmp[j] *= std::exp(cplx(0.0, -dt * cnorm[i] * eigvals[i][j]));
      }
      v = eigvecs[i] * tmp;
      psi.row(i) = (pot_phase[i] * v).transpose();
    }
  }

  /// Fused Strang run of n steps on the work buffer (x-space in, x-space out).
  /// Returns the worst momentum-band fraction seen at the final kinetic stage.
  double advance(int n, double dt) {
    const double scale = 1.0 / static_cast<double>(grid.num_points());
    fftw_execute(plans->fwd);
    work.array().colwise() *= kin_half.array();
    for (int step = 0; step < n; ++step) {
      fftw_execute(plans->bwd);
      work *= scale;
      apply_potential(work, dt);
      fftw_execute(plans->fwd);
      if (step + 1 < n) {
        work.array().colwise() *= kin_full.array();
      } else {
        work.array().colwise() *= kin_half.array();
      }
    }
    const double kband = momentum_band_fraction(grid, work, 2);
    fftw_execute(plans->bwd);
    work *= scale;
    return kband;
  }

  void check_tails(const GridState& state, double t, double kband) const {
    const double mass = state.boundary_mass(3);
    if (mass > tail_threshold) {
      throw Error("split_step: boundary tail mass " + std::to_string(mass) + " at t=" +
                  std::to_string(t) + " exceeds threshold (position wrap-around imminent)");
    }
    if (kband > tail_threshold) {
      throw Error("split_step: momentum tail fraction " + std::to_string(kband) + " at t=" +
                  std::to_string(t) + " exceeds threshold (momentum grid too small)");
    }
  }
};

SplitStepPropagator::SplitStepPropagator(std::shared_ptr<const SpinOrbitModel> model,
                                         const Grid& grid, double hbar, int two_s,
                                         PropagatorConfig config)
    : impl_(std::make_unique<Impl>(std::move(model), grid, hbar, two_s,
                                   config.tail_threshold)),
      config_(config) {
  if (config_.dt <= 0.0) throw Error("SplitStepPropagator: dt must be positive");
}

SplitStepPropagator::~SplitStepPropagator() = default;

std::vector<GridState> SplitStepPropagator::propagate_series(
    const GridState& initial, const std::vector<double>& times) const {
  if (times.empty()) throw Error("propagate_series: no output times");
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1])) {
      throw Error("propagate_series: times must be sorted and nonnegative");
    }
  }
  if (initial.two_s != impl_->two_s || std::abs(initial.hbar - impl_->hbar) > 1e-15) {
    throw Error("propagate_series: state does not match the propagator");
  }

  impl_->check_tails(initial, 0.0, 0.0);

  GridState state = initial;
  std::vector<GridState> out;
  double t = 0.0;
  for (double target : times) {
    const double span = target - t;
    if (span > 1e-14) {
      const int n_steps = std::max(1L, std::lround(span / config_.dt));
      const double dt = span / n_steps;
      impl_->set_dt(dt);
      int check_every = config_.check_interval > 0
                            ? config_.check_interval
                            : std::max(1, n_steps / 128 + 1);
      int done = 0;
      while (done < n_steps) {
        const int chunk = std::min(check_every, n_steps - done);
        impl_->work = state.psi;
        const double kband = impl_->advance(chunk, dt);
        state.psi = impl_->work;
        done += chunk;
        impl_->check_tails(state, t + done * dt, kband);
      }
      t = target;
    }
    out.push_back(state);
  }
  return out;
}

GridState SplitStepPropagator::propagate(const GridState& initial, double t_final) const {
  return propagate_series(initial, {t_final}).back();
}

GridState split_step(std::shared_ptr<const SpinOrbitModel> model, const GridState& state,
                     const PropagatorConfig& config, double t_final) {
  SplitStepPropagator prop(model, state.grid, state.hbar, state.two_s, config);
  return prop.propagate(state, t_final);
}

ObservableRecord observables(const GridState& state, std::shared_ptr<const SpinOrbitModel> model) {
  const Grid& grid = state.grid;
  const int d = grid.dim();
  const long np = grid.num_points();
  const double dv = grid.volume_element();
  const double norm2 = state.psi.squaredNorm() * dv;
  if (norm2 <= 0.0) throw Error("observables: empty state");

  ObservableRecord rec;
  rec.x_mean = Vec::Zero(d);
  for (long i = 0; i < np; ++i) {
    const double w = state.psi.row(i).squaredNorm() * dv;
    for (int a = 0; a < d; ++a) rec.x_mean[a] += grid.coord(a, i) * w;
  }
  rec.x_mean /= norm2;

  // Momentum moments via the Fourier multiplier.
  CMat psik = state.psi;
  {
    FftPlans plans(grid, state.spin_dim(), psik.data());
    fftw_execute(plans.fwd);
  }
  const double ktot = psik.squaredNorm();
  rec.p_mean = Vec::Zero(d);
  double kinetic = 0.0;
  for (long i = 0; i < np; ++i) {
    const double w = psik.row(i).squaredNorm();
    for (int a = 0; a < d; ++a) {
      rec.p_mean[a] += grid.momentum(a, grid.index_along(a, i), state.hbar) * w;
    }
    kinetic += kinetic_energy_at(grid, i, state.hbar, model ? model->mass() : 1.0) * w;
  }
  rec.p_mean /= ktot;
  kinetic /= ktot;

  const SpinRep rep(0.5 * state.two_s);
  for (int k = 0; k < 3; ++k) {
    cplx acc = 0.0;
    for (long i = 0; i < np; ++i) {
      const CVec v = state.psi.row(i).transpose();
      acc += (v.adjoint() * rep.S(k + 1) * v)(0) * dv;
    }
    rec.spin_mean[k] = acc.real() / norm2;
  }

  if (model) {
    double pot = 0.0;
    Vec w = Vec::Zero(2 * d);
    for (long i = 0; i < np; ++i) {
      for (int a = 0; a < d; ++a) w[a] = grid.coord(a, i);
      pot += model->potential(w.head(d)) * state.psi.row(i).squaredNorm() * dv;
      const CVec v = state.psi.row(i).transpose();
      pot += state.hbar * (v.adjoint() * rep.dot(model->C(w)) * v)(0).real() * dv;
    }
    rec.energy = kinetic + pot / norm2;
  }
  return rec;
}

} // namespace socs
