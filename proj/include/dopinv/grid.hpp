#ifndef DOPINV_GRID_HPP
#define DOPINV_GRID_HPP

#include <Eigen/Core>
#include <utility>

#include "dopinv/errors.hpp"

namespace dopinv {

/// Boundary classification of a grid node. The device occupies the unit
/// square; the two Ohmic contacts are the bottom edge (Gamma0) and the top
/// edge (Gamma1), the lateral edges x=0 and x=1 are insulating. Corners are
/// assigned to the contact edges so that every Dirichlet row is unambiguous.
enum class Segment { Gamma0, Gamma1, NeumannLeft, NeumannRight, Interior };

/// Uniform node-centered lattice on the unit square, n nodes per side.
/// Node (ix, iy) lives at (ix/(n-1), iy/(n-1)) and has linear index
/// iy*n + ix, so consecutive indices sweep a row of constant y.
class Grid {
 public:
  Grid() : n_(0) {}
  explicit Grid(int n) : n_(n) {
    if (n < 3) throw DomainError("grid: need at least 3 nodes per side");
  }

  int n() const { return n_; }
  int num_nodes() const { return n_ * n_; }
  double spacing() const { return 1.0 / (n_ - 1); }

  int index(int ix, int iy) const { return iy * n_ + ix; }
  int ix_of(int node) const { return node % n_; }
  int iy_of(int node) const { return node / n_; }
  double coord(int i) const { return static_cast<double>(i) / (n_ - 1); }
  double x_of(int node) const { return coord(ix_of(node)); }
  double y_of(int node) const { return coord(iy_of(node)); }

  Segment segment_of(int node) const {
    const int ix = ix_of(node), iy = iy_of(node);
    if (iy == 0) return Segment::Gamma0;
    if (iy == n_ - 1) return Segment::Gamma1;
    if (ix == 0) return Segment::NeumannLeft;
    if (ix == n_ - 1) return Segment::NeumannRight;
    return Segment::Interior;
  }

  /// Dirichlet rows used by every solver: both contacts, corners included.
  bool is_dirichlet(int node) const {
    const int iy = iy_of(node);
    return iy == 0 || iy == n_ - 1;
  }

  bool operator==(const Grid& other) const { return n_ == other.n_; }
  bool operator!=(const Grid& other) const { return n_ != other.n_; }

 private:
  int n_;
};

Grid build_grid(int n);

/// One real value per grid node.
struct ScalarField {
  Grid grid;
  Eigen::VectorXd values;

  double& operator()(int ix, int iy) { return values[grid.index(ix, iy)]; }
  double operator()(int ix, int iy) const { return values[grid.index(ix, iy)]; }
};

ScalarField constant_field(const Grid& grid, double value);

template <class F>
ScalarField make_field(const Grid& grid, F&& f) {
  ScalarField out{grid, Eigen::VectorXd(grid.num_nodes())};
  for (int iy = 0; iy < grid.n(); ++iy)
    for (int ix = 0; ix < grid.n(); ++ix)
      out.values[grid.index(ix, iy)] = f(grid.coord(ix), grid.coord(iy));
  return out;
}

/// Throws DomainError if the field contains NaN or Inf.
void require_finite(const ScalarField& f, const char* who);

/// Values along one boundary segment, ordered by increasing coordinate
/// (x for the contacts, y for the lateral edges).
struct BoundaryTrace {
  Segment segment;
  Grid grid;
  Eigen::VectorXd values;
};

BoundaryTrace restrict_to_segment(const ScalarField& f, Segment seg);

/// (d/dx f, d/dy f): central differences inside, second-order one-sided
/// stencils on the boundary. Exact on affine and quadratic fields.
std::pair<ScalarField, ScalarField> gradient(const ScalarField& f);

/// Outward normal derivative on a contact (second-order one-sided stencil).
/// Only Gamma0/Gamma1 carry measurements; lateral edges are rejected.
BoundaryTrace normal_derivative(const ScalarField& f, Segment seg);

/// Trapezoid quadrature of a trace over its segment.
double boundary_integral(const BoundaryTrace& t);

/// Five-point Laplacian inside; one-sided four-point second-derivative
/// stencils on the boundary rows/columns (second-order throughout).
ScalarField laplacian(const ScalarField& f);

/// 1D trapezoid weights along a contact: h * [1/2, 1, ..., 1, 1/2].
Eigen::VectorXd trace_weights(const Grid& grid);

/// 2D tensor trapezoid weights; also the finite-volume cell areas.
Eigen::VectorXd node_weights(const Grid& grid);

double l2_inner(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& a);
double sup_norm(const ScalarField& a);

}  // namespace dopinv

#endif  // DOPINV_GRID_HPP
