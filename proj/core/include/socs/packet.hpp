#pragma once

#include <optional>
#include <string>
#include <vector>

#include "socs/flows.hpp"
#include "socs/grid.hpp"
#include "socs/siegel.hpp"
#include "socs/spin_rep.hpp"

namespace socs {

/// Spin factor of a packet: normalized vector in C^{2s+1} plus the classical
/// direction it is attached to.  The vector carries its own transport phase.
struct SpinState {
  CVec v;
  Vec3 n;

  int two_s() const { return static_cast<int>(v.size()) - 1; }
  double s() const { return 0.5 * two_s(); }
};

SpinState make_spin_state(const SpinRep& rep, const SpinDirection& n);

/// Gaussian coherent state phi^B_(q,p) with Siegel width matrix B, optionally
/// tensored with a spin state.  The realized wavefunction is
///   (pi hbar)^{-d/4} (det Im B)^{1/4}
///     * exp[(i/hbar)(p.(x-q) + (x-q).B(x-q)/2)] * exp(log_prefactor) * v_spin.
/// log_prefactor accumulates i(action/hbar) and the branch-tracked Maslov
/// phase; the |.|-normalization always comes from the current (det Im B)^{1/4}.
struct GaussianPacket {
  Vec q;
  Vec p;
  SiegelMatrix B;
  double hbar = 1.0;
  cplx log_prefactor = cplx(0.0, 0.0);
  std::optional<SpinState> spin;

  int dim() const { return static_cast<int>(q.size()); }
};

GaussianPacket make_packet(const Vec& q, const Vec& p, const SiegelMatrix& B, double hbar,
                           std::optional<SpinState> spin = std::nullopt);

/// Samples the packet on a grid.  Requires the grid to span at least 8
/// standard deviations of |phi|^2 around q on every axis and the boundary
/// tail mass to stay below 1e-10; otherwise throws.
GridState evaluate_packet(const GaussianPacket& packet, const Grid& grid);

/// Total phase-space spread (sum of position and momentum variances) of the
/// packet's Wigner transform, in closed form (hbar/2) tr(G_B^{-1}).
double wigner_second_moment(const GaussianPacket& packet);

/// Block flip [[S22, S21], [S12, S11]] mapping the flow differential to the
/// symplectic matrix whose Moebius action propagates B; see siegel_action.
Mat monodromy_to_siegel(const Mat& S);

struct PacketPropagation {
  std::vector<GaussianPacket> packets; // one per requested time
  TrajectoryBundle trajectory;
  double max_riccati_residual = 0.0; // defect of the B(t) evolution equation
  double max_maslov_step = 0.0;      // largest |arg w| increment per sample
};

/// Propagates a packet along the classical flow of the given kind: center by
/// the flow, B by the Moebius action of the monodromy, spin vector by the
/// SU(2) transport, prefactor by the action integral and the Maslov branch.
/// `times` must be sorted, starting at >= 0.
PacketPropagation propagate_packet_series(std::shared_ptr<const SpinOrbitModel> model,
                                          const GaussianPacket& packet, FlowKind kind,
                                          const std::vector<double>& times,
                                          const TrajectoryOptions& opts = {});

/// hbar -> 0 at fixed spin quantum number: skew-product classical data.
GaussianPacket propagate_packet_scenario_a(std::shared_ptr<const SpinOrbitModel> model,
                                           const GaussianPacket& packet, double t,
                                           const TrajectoryOptions& opts = {});

/// hbar -> 0 at fixed S = hbar s: coupled spin-orbit classical data.
/// Requires S_spin/hbar to be a half-integer matching the packet's spin.
GaussianPacket propagate_packet_scenario_b(std::shared_ptr<const SpinOrbitModel> model,
                                           const GaussianPacket& packet, double S_spin, double t,
                                           const TrajectoryOptions& opts = {});

/// JSON round-trip of (q, p, Re B, Im B, hbar, spin components, log_prefactor).
std::string packet_to_json(const GaussianPacket& packet);
GaussianPacket packet_from_json(const std::string& text);

} // namespace socs
