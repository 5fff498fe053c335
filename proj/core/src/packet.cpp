#include "socs/packet.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace socs {

using nlohmann::json;

SpinState make_spin_state(const SpinRep& rep, const SpinDirection& n) {
  return SpinState{coherent_vector_any(rep, n), n.n()};
}

GaussianPacket make_packet(const Vec& q, const Vec& p, const SiegelMatrix& B, double hbar,
                           std::optional<SpinState> spin) {
  if (hbar <= 0.0) throw Error("make_packet: hbar must be positive");
  if (q.size() != p.size() || q.size() != B.dim()) {
    throw Error("make_packet: inconsistent dimensions of q, p, B");
  }
  if (spin && std::abs(spin->v.norm() - 1.0) > 1e-10) {
    throw Error("make_packet: spin vector must be normalized");
  }
  return GaussianPacket{q, p, B, hbar, cplx(0.0, 0.0), std::move(spin)};
}

GridState evaluate_packet(const GaussianPacket& packet, const Grid& grid) {
  const int d = packet.dim();
  if (grid.dim() != d) throw Error("evaluate_packet: grid dimension mismatch");
  const double hbar = packet.hbar;

  // Coverage: 8 sigma of |phi|^2 on every axis, sigma from the loosest
  // direction of Im B.
  Eigen::SelfAdjointEigenSolver<Mat> es(packet.B.im());
  const double sigma_max = std::sqrt(hbar / (2.0 * es.eigenvalues().minCoeff()));
  for (int a = 0; a < d; ++a) {
    const double lo = packet.q[a] - grid.axis(a).x_min;
    const double hi = grid.axis(a).x_max - packet.q[a];
    if (lo < 8.0 * sigma_max || hi < 8.0 * sigma_max) {
      throw Error("evaluate_packet: grid spans less than 8 standard deviations around q on axis " +
                  std::to_string(a));
    }
  }

  const int two_s = packet.spin ? packet.spin->two_s() : 0;
  GridState state = make_grid_state(grid, hbar, two_s);

  const double log_norm =
      -0.25 * d * std::log(pi * hbar) + 0.25 * std::log(packet.B.im().determinant());
  const CMat& B = packet.B.mat();
  const long np = grid.num_points();
  Vec x(d);
  CVec spin = packet.spin ? packet.spin->v : CVec::Ones(1);
  for (long i = 0; i < np; ++i) {
    for (int a = 0; a < d; ++a) x[a] = grid.coord(a, i);
    const Vec u = x - packet.q;
    const cplx quad = packet.p.dot(u) + 0.5 * (u.transpose() * (B * u))(0);
    const cplx amp = std::exp(log_norm + cplx(0.0, 1.0) / hbar * quad + packet.log_prefactor);
    state.psi.row(i) = amp * spin.transpose();
  }

  const double tail = state.boundary_mass(3);
  if (tail > 1e-10) {
    throw Error("evaluate_packet: boundary tail mass " + std::to_string(tail) +
                " exceeds 1e-10; enlarge the grid");
  }
  return state;
}

double wigner_second_moment(const GaussianPacket& packet) {
  const Mat g = gb_matrix(packet.B);
  return 0.5 * packet.hbar * g.inverse().trace();
}

Mat monodromy_to_siegel(const Mat& S) {
  const int d = static_cast<int>(S.rows()) / 2;
  Mat out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = S.bottomRightCorner(d, d);
  out.topRightCorner(d, d) = S.bottomLeftCorner(d, d);
  out.bottomLeftCorner(d, d) = S.topRightCorner(d, d);
  out.bottomRightCorner(d, d) = S.topLeftCorner(d, d);
  return out;
}

namespace {

// Right-hand side of the width equation solved by the Moebius propagation,
//   Bdot = H_pp + H_px B + B H_xp + B H_xx B,
// with H blocks of the (frozen-n) Hessian along the trajectory.
CMat riccati_rhs(const Mat& hess, const CMat& B) {
  const int d = static_cast<int>(B.rows());
  const Mat hxx = hess.topLeftCorner(d, d);
  const Mat hxp = hess.topRightCorner(d, d);
  const Mat hpx = hess.bottomLeftCorner(d, d);
  const Mat hpp = hess.bottomRightCorner(d, d);
  return hpp + hpx * B + B * hxp + B * hxx * B;
}

} // namespace

PacketPropagation propagate_packet_series(std::shared_ptr<const SpinOrbitModel> model,
                                          const GaussianPacket& packet, FlowKind kind,
                                          const std::vector<double>& times,
                                          const TrajectoryOptions& opts_in) {
  if (!model) throw Error("propagate_packet_series: null model");
  if (!packet.spin) throw Error("propagate_packet_series: packet must carry a spin state");
  if (times.empty()) throw Error("propagate_packet_series: no output times");
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] <= times[i - 1])) {
      throw Error("propagate_packet_series: times must be sorted and nonnegative");
    }
  }
  if (model->dim() != packet.dim()) throw Error("propagate_packet_series: dimension mismatch");

  const SpinRep rep(packet.spin->s());
  const SpinDirection n0(packet.spin->n);

  TrajectoryOptions opts = opts_in;
  opts.sample_times = times;
  if (opts.renorm_interval > 0.0) {
    throw Error("propagate_packet_series: packet propagation needs the raw (symplectic) monodromy; "
                "disable renorm_interval");
  }
  const double t_final = times.back();

  Vec z0(2 * packet.dim());
  z0.head(packet.dim()) = packet.q;
  z0.tail(packet.dim()) = packet.p;

  PacketPropagation out;
  out.trajectory = integrate_flow(model, kind, z0, n0, t_final, opts);
  const auto& traj = out.trajectory;
  MaslovTracker tracker;
  const double S_len = kind.kind == FlowKind::spin_orbit ? kind.S : 0.0;

  size_t next_out = 0;
  CMat B_prev = packet.B.mat();
  double t_prev = 0.0;
  Mat hess_prev =
      kind.kind == FlowKind::spin_orbit
          ? hess_h_so(*model, traj.samples.front().z, traj.samples.front().n, S_len)
          : model->hess_h0(traj.samples.front().z);

  for (const auto& sample : traj.samples) {
    const Mat mono = monodromy_to_siegel(sample.S_mat);
    const MaslovTracker updated = maslov_update(tracker, mono, packet.B);
    out.max_maslov_step = std::max(out.max_maslov_step, std::abs(updated.branch - tracker.branch));
    tracker = updated;

    const SiegelMatrix B_t = siegel_action(mono, packet.B);

    // Riccati cross-check (midpoint finite difference, second order in the
    // sample spacing).
    const Mat hess = kind.kind == FlowKind::spin_orbit
                         ? hess_h_so(*model, sample.z, sample.n, S_len)
                         : model->hess_h0(sample.z);
    if (sample.t > t_prev) {
      const double dt = sample.t - t_prev;
      const CMat fd = (B_t.mat() - B_prev) / dt;
      const CMat rhs = 0.5 * (riccati_rhs(hess_prev, B_prev) + riccati_rhs(hess, B_t.mat()));
      const double resid = max_abs(fd - rhs) / (1.0 + max_abs(rhs));
      out.max_riccati_residual = std::max(out.max_riccati_residual, resid);
    }
    B_prev = B_t.mat();
    hess_prev = hess;
    t_prev = sample.t;

    while (next_out < times.size() && std::abs(sample.t - times[next_out]) <= 1e-9) {
      GaussianPacket evolved = packet;
      evolved.q = sample.z.head(packet.dim());
      evolved.p = sample.z.tail(packet.dim());
      evolved.B = B_t;
      evolved.log_prefactor = packet.log_prefactor +
                              cplx(0.0, sample.action / packet.hbar) +
                              cplx(0.0, -0.5 * tracker.branch);
      SpinState spin;
      spin.v = sample.g.represent(rep) * packet.spin->v;
      spin.n = sample.n;
      evolved.spin = std::move(spin);
      out.packets.push_back(std::move(evolved));
      ++next_out;
    }
  }
  if (next_out != times.size()) {
    throw Error("propagate_packet_series: missing trajectory samples at requested times");
  }
  return out;
}

GaussianPacket propagate_packet_scenario_a(std::shared_ptr<const SpinOrbitModel> model,
                                           const GaussianPacket& packet, double t,
                                           const TrajectoryOptions& opts) {
  auto res = propagate_packet_series(model, packet, FlowKind::make_skew(), {t}, opts);
  return res.packets.back();
}

GaussianPacket propagate_packet_scenario_b(std::shared_ptr<const SpinOrbitModel> model,
                                           const GaussianPacket& packet, double S_spin, double t,
                                           const TrajectoryOptions& opts) {
  if (!packet.spin) throw Error("propagate_packet_scenario_b: packet must carry a spin state");
  const double s = S_spin / packet.hbar;
  if (std::abs(2.0 * s - std::round(2.0 * s)) > 1e-9) {
    throw Error("propagate_packet_scenario_b: S/hbar = " + std::to_string(s) +
                " is not a half-integer; choose hbar = S/s");
  }
  if (std::lround(2.0 * s) != packet.spin->two_s()) {
    throw Error("propagate_packet_scenario_b: S/hbar does not match the packet's spin dimension");
  }
  auto res = propagate_packet_series(model, packet, FlowKind::make_spin_orbit(S_spin), {t}, opts);
  return res.packets.back();
}

std::string packet_to_json(const GaussianPacket& packet) {
  json j;
  j["q"] = std::vector<double>(packet.q.data(), packet.q.data() + packet.q.size());
  j["p"] = std::vector<double>(packet.p.data(), packet.p.data() + packet.p.size());
  const int d = packet.dim();
  std::vector<std::vector<double>> re(d, std::vector<double>(d)), im(d, std::vector<double>(d));
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      re[r][c] = packet.B.mat()(r, c).real();
      im[r][c] = packet.B.mat()(r, c).imag();
    }
  }
  j["B_re"] = re;
  j["B_im"] = im;
  j["hbar"] = packet.hbar;
  j["log_prefactor"] = {packet.log_prefactor.real(), packet.log_prefactor.imag()};
  if (packet.spin) {
    std::vector<std::vector<double>> v;
    for (int i = 0; i < packet.spin->v.size(); ++i) {
      v.push_back({packet.spin->v[i].real(), packet.spin->v[i].imag()});
    }
    j["spin_v"] = v;
    j["spin_n"] = {packet.spin->n[0], packet.spin->n[1], packet.spin->n[2]};
  }
  return j.dump(2);
}

GaussianPacket packet_from_json(const std::string& text) {
  const json j = json::parse(text);
  const auto qv = j.at("q").get<std::vector<double>>();
  const auto pv = j.at("p").get<std::vector<double>>();
  const int d = static_cast<int>(qv.size());
  Vec q = Eigen::Map<const Vec>(qv.data(), d);
  Vec p = Eigen::Map<const Vec>(pv.data(), d);
  CMat B(d, d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      B(r, c) = cplx(j.at("B_re")[r][c].get<double>(), j.at("B_im")[r][c].get<double>());
    }
  }
  GaussianPacket packet = make_packet(q, p, SiegelMatrix(B), j.at("hbar").get<double>());
  packet.log_prefactor =
      cplx(j.at("log_prefactor")[0].get<double>(), j.at("log_prefactor")[1].get<double>());
  if (j.contains("spin_v")) {
    SpinState spin;
    const auto& vv = j.at("spin_v");
    spin.v = CVec(vv.size());
    for (size_t i = 0; i < vv.size(); ++i) {
      spin.v[static_cast<long>(i)] = cplx(vv[i][0].get<double>(), vv[i][1].get<double>());
    }
    spin.n = Vec3(j.at("spin_n")[0].get<double>(), j.at("spin_n")[1].get<double>(),
                  j.at("spin_n")[2].get<double>());
    packet.spin = std::move(spin);
  }
  return packet;
}

} // namespace socs
