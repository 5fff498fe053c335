#pragma once

#include <vector>

#include "socs/types.hpp"

namespace socs {

struct GridAxis {
  double x_min = 0.0;
  double x_max = 0.0;
  int n = 0; // power of two
};

/// Uniform periodic spatial grid, d in {1, 2}.  The conjugate momentum grid
/// for Planck constant hbar is xi_k = 2 pi hbar k / L with k in [-N/2, N/2).
class Grid {
public:
  explicit Grid(std::vector<GridAxis> axes);

  int dim() const { return static_cast<int>(axes_.size()); }
  const GridAxis& axis(int a) const { return axes_[a]; }
  long num_points() const { return num_points_; }
  double spacing(int a) const { return (axes_[a].x_max - axes_[a].x_min) / axes_[a].n; }
  double length(int a) const { return axes_[a].x_max - axes_[a].x_min; }
  double volume_element() const;

  /// Coordinate of the grid index along axis a (flat index decomposed with
  /// axis 0 fastest).
  double coord(int a, long flat) const;
  int index_along(int a, long flat) const;
  /// Signed momentum of FFT bin j along axis a.
  double momentum(int a, int j, double hbar) const;
  /// Largest representable |xi| on axis a.
  double momentum_cutoff(int a, double hbar) const;

private:
  std::vector<GridAxis> axes_;
  long num_points_ = 0;
};

/// Spinor wavefunction sampled on a grid: column s holds the s-th spin
/// component over all points (axis-0-fastest flattening).
struct GridState {
  Grid grid;
  double hbar = 0.0;
  int two_s = 0;
  CMat psi; // num_points x (2s+1)

  int spin_dim() const { return two_s + 1; }
  double norm() const;
  /// Probability mass within `cells` grid cells of any boundary.
  double boundary_mass(int cells) const;
};

GridState make_grid_state(const Grid& grid, double hbar, int two_s);

/// Discrete L^2 (x) C^{2s+1} norm of a - b; global phases are not quotiented.
double error_norm(const GridState& a, const GridState& b);

/// <a, b> with the same discrete measure.
cplx overlap(const GridState& a, const GridState& b);

} // namespace socs
