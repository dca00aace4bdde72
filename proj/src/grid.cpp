#include "dopinv/grid.hpp"

#include <cmath>

namespace dopinv {

Grid build_grid(int n) { return Grid(n); }

ScalarField constant_field(const Grid& grid, double value) {
  return ScalarField{grid, Eigen::VectorXd::Constant(grid.num_nodes(), value)};
}

void require_finite(const ScalarField& f, const char* who) {
  if (f.values.size() != f.grid.num_nodes())
    throw DimensionError(std::string(who) + ": field size does not match grid");
  if (!f.values.allFinite())
    throw DomainError(std::string(who) + ": field contains NaN or Inf");
}

BoundaryTrace restrict_to_segment(const ScalarField& f, Segment seg) {
  const Grid& g = f.grid;
  const int n = g.n();
  Eigen::VectorXd v(n);
  switch (seg) {
    case Segment::Gamma0:
      for (int ix = 0; ix < n; ++ix) v[ix] = f.values[g.index(ix, 0)];
      break;
    case Segment::Gamma1:
      for (int ix = 0; ix < n; ++ix) v[ix] = f.values[g.index(ix, n - 1)];
      break;
    case Segment::NeumannLeft:
      for (int iy = 0; iy < n; ++iy) v[iy] = f.values[g.index(0, iy)];
      break;
    case Segment::NeumannRight:
      for (int iy = 0; iy < n; ++iy) v[iy] = f.values[g.index(n - 1, iy)];
      break;
    default:
      throw DomainError("restrict_to_segment: interior is not a segment");
  }
  return BoundaryTrace{seg, g, std::move(v)};
}

namespace {

// d/ds along one line of nodes with stride `stride` starting at `base`.
inline double line_derivative(const Eigen::VectorXd& v, int base, int stride,
                              int i, int count, double h) {
  if (i == 0)
    return (-3.0 * v[base] + 4.0 * v[base + stride] - v[base + 2 * stride]) /
           (2.0 * h);
  if (i == count - 1)
    return (3.0 * v[base + i * stride] - 4.0 * v[base + (i - 1) * stride] +
            v[base + (i - 2) * stride]) /
           (2.0 * h);
  return (v[base + (i + 1) * stride] - v[base + (i - 1) * stride]) / (2.0 * h);
}

inline double line_second_derivative(const Eigen::VectorXd& v, int base,
                                     int stride, int i, int count, double h2) {
  if (i == 0)
    return (2.0 * v[base] - 5.0 * v[base + stride] + 4.0 * v[base + 2 * stride] -
            v[base + 3 * stride]) /
           h2;
  if (i == count - 1) {
    const int b = base + i * stride;
    return (2.0 * v[b] - 5.0 * v[b - stride] + 4.0 * v[b - 2 * stride] -
            v[b - 3 * stride]) /
           h2;
  }
  const int b = base + i * stride;
  return (v[b - stride] - 2.0 * v[b] + v[b + stride]) / h2;
}

}  // namespace

std::pair<ScalarField, ScalarField> gradient(const ScalarField& f) {
  require_finite(f, "gradient");
  const Grid& g = f.grid;
  const int n = g.n();
  const double h = g.spacing();
  ScalarField dx{g, Eigen::VectorXd(g.num_nodes())};
  ScalarField dy{g, Eigen::VectorXd(g.num_nodes())};
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int id = g.index(ix, iy);
      dx.values[id] = line_derivative(f.values, g.index(0, iy), 1, ix, n, h);
      dy.values[id] = line_derivative(f.values, g.index(ix, 0), n, iy, n, h);
    }
  return {std::move(dx), std::move(dy)};
}

BoundaryTrace normal_derivative(const ScalarField& f, Segment seg) {
  require_finite(f, "normal_derivative");
  const Grid& g = f.grid;
  const int n = g.n();
  const double h = g.spacing();
  if (seg != Segment::Gamma0 && seg != Segment::Gamma1)
    throw DomainError("normal_derivative: only the contacts carry traces");
  Eigen::VectorXd v(n);
  if (seg == Segment::Gamma1) {
    // outward normal is +e_y
    for (int ix = 0; ix < n; ++ix)
      v[ix] = (3.0 * f.values[g.index(ix, n - 1)] -
               4.0 * f.values[g.index(ix, n - 2)] +
               f.values[g.index(ix, n - 3)]) /
              (2.0 * h);
  } else {
    // outward normal is -e_y
    for (int ix = 0; ix < n; ++ix)
      v[ix] = (3.0 * f.values[g.index(ix, 0)] - 4.0 * f.values[g.index(ix, 1)] +
               f.values[g.index(ix, 2)]) /
              (2.0 * h);
  }
  return BoundaryTrace{seg, g, std::move(v)};
}

double boundary_integral(const BoundaryTrace& t) {
  const int n = t.grid.n();
  const double h = t.grid.spacing();
  double sum = 0.5 * (t.values[0] + t.values[n - 1]);
  for (int i = 1; i < n - 1; ++i) sum += t.values[i];
  return h * sum;
}

ScalarField laplacian(const ScalarField& f) {
  require_finite(f, "laplacian");
  const Grid& g = f.grid;
  const int n = g.n();
  const double h2 = g.spacing() * g.spacing();
  ScalarField out{g, Eigen::VectorXd(g.num_nodes())};
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const int id = g.index(ix, iy);
      out.values[id] =
          line_second_derivative(f.values, g.index(0, iy), 1, ix, n, h2) +
          line_second_derivative(f.values, g.index(ix, 0), n, iy, n, h2);
    }
  return out;
}

Eigen::VectorXd trace_weights(const Grid& grid) {
  const int n = grid.n();
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, grid.spacing());
  w[0] *= 0.5;
  w[n - 1] *= 0.5;
  return w;
}

Eigen::VectorXd node_weights(const Grid& grid) {
  const int n = grid.n();
  const double h = grid.spacing();
  Eigen::VectorXd w(grid.num_nodes());
  for (int iy = 0; iy < n; ++iy) {
    const double wy = (iy == 0 || iy == n - 1) ? 0.5 : 1.0;
    for (int ix = 0; ix < n; ++ix) {
      const double wx = (ix == 0 || ix == n - 1) ? 0.5 : 1.0;
      w[grid.index(ix, iy)] = h * h * wx * wy;
    }
  }
  return w;
}

double l2_inner(const ScalarField& a, const ScalarField& b) {
  if (a.grid != b.grid) throw DimensionError("l2_inner: grid mismatch");
  const Eigen::VectorXd w = node_weights(a.grid);
  return (a.values.array() * b.values.array() * w.array()).sum();
}

double l2_norm(const ScalarField& a) { return std::sqrt(l2_inner(a, a)); }

double sup_norm(const ScalarField& a) {
  return a.values.array().abs().maxCoeff();
}

}  // namespace dopinv
