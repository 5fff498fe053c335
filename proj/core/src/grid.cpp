#include "socs/grid.hpp"

#include <cmath>

namespace socs {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}

Grid::Grid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 2) throw Error("Grid: d must be 1 or 2");
  num_points_ = 1;
  for (const auto& ax : axes_) {
    if (!(ax.x_max > ax.x_min)) throw Error("Grid: axis must have x_max > x_min");
    if (!power_of_two(ax.n)) throw Error("Grid: point count must be a power of two");
    num_points_ *= ax.n;
  }
}

double Grid::volume_element() const {
  double dv = 1.0;
  for (int a = 0; a < dim(); ++a) dv *= spacing(a);
  return dv;
}

int Grid::index_along(int a, long flat) const {
  long idx = flat;
  for (int b = 0; b < a; ++b) idx /= axes_[b].n;
  return static_cast<int>(idx % axes_[a].n);
}

double Grid::coord(int a, long flat) const {
  return axes_[a].x_min + spacing(a) * index_along(a, flat);
}

double Grid::momentum(int a, int j, double hbar) const {
  const int n = axes_[a].n;
  const int k = (j < n / 2) ? j : j - n;
  return 2.0 * pi * hbar * k / length(a);
}

double Grid::momentum_cutoff(int a, double hbar) const {
  return pi * hbar * axes_[a].n / length(a);
}

double GridState::norm() const {
  return std::sqrt(psi.squaredNorm() * grid.volume_element());
}

double GridState::boundary_mass(int cells) const {
  double mass = 0.0;
  const long np = grid.num_points();
  for (long i = 0; i < np; ++i) {
    bool near_edge = false;
    for (int a = 0; a < grid.dim(); ++a) {
      const int idx = grid.index_along(a, i);
      if (idx < cells || idx >= grid.axis(a).n - cells) near_edge = true;
    }
    if (near_edge) mass += psi.row(i).squaredNorm();
  }
  return mass * grid.volume_element();
}

GridState make_grid_state(const Grid& grid, double hbar, int two_s) {
  if (hbar <= 0.0) throw Error("make_grid_state: hbar must be positive");
  if (two_s < 0) throw Error("make_grid_state: invalid spin dimension");
  GridState st{grid, hbar, two_s, CMat::Zero(grid.num_points(), two_s + 1)};
  return st;
}

namespace {
void check_compatible(const GridState& a, const GridState& b) {
  if (a.two_s != b.two_s || a.grid.num_points() != b.grid.num_points() ||
      a.grid.dim() != b.grid.dim()) {
    throw Error("GridState: shape mismatch");
  }
  for (int ax = 0; ax < a.grid.dim(); ++ax) {
    if (a.grid.axis(ax).n != b.grid.axis(ax).n ||
        std::abs(a.grid.axis(ax).x_min - b.grid.axis(ax).x_min) > 1e-12 ||
        std::abs(a.grid.axis(ax).x_max - b.grid.axis(ax).x_max) > 1e-12) {
      throw Error("GridState: grids differ");
    }
  }
}
} // namespace

double error_norm(const GridState& a, const GridState& b) {
  check_compatible(a, b);
  return std::sqrt((a.psi - b.psi).squaredNorm() * a.grid.volume_element());
}

cplx overlap(const GridState& a, const GridState& b) {
  check_compatible(a, b);
  cplx acc = 0.0;
  for (int c = 0; c < a.spin_dim(); ++c) {
    acc += a.psi.col(c).dot(b.psi.col(c));
  }
  return acc * a.grid.volume_element();
}

} // namespace socs
