#include "dopinv/elliptic.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>

namespace dopinv {

DirichletData dirichlet_from_field(const ScalarField& f) {
  return DirichletData{restrict_to_segment(f, Segment::Gamma0),
                       restrict_to_segment(f, Segment::Gamma1)};
}

DirichletData dirichlet_constant(const Grid& grid, double v0, double v1) {
  return DirichletData{
      BoundaryTrace{Segment::Gamma0, grid,
                    Eigen::VectorXd::Constant(grid.n(), v0)},
      BoundaryTrace{Segment::Gamma1, grid,
                    Eigen::VectorXd::Constant(grid.n(), v1)}};
}

namespace detail {

Mesh build_mesh(const Grid& grid, bool contacts_dirichlet) {
  Mesh m;
  m.grid = grid;
  const int n = grid.n();
  m.faces.reserve(2 * n * (n - 1));
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix + 1 < n; ++ix) {
      const double geom = (iy == 0 || iy == n - 1) ? 0.5 : 1.0;
      m.faces.push_back({grid.index(ix, iy), grid.index(ix + 1, iy), geom});
    }
  for (int ix = 0; ix < n; ++ix)
    for (int iy = 0; iy + 1 < n; ++iy) {
      const double geom = (ix == 0 || ix == n - 1) ? 0.5 : 1.0;
      m.faces.push_back({grid.index(ix, iy), grid.index(ix, iy + 1), geom});
    }
  m.free_of_node.assign(grid.num_nodes(), -1);
  for (int id = 0; id < grid.num_nodes(); ++id) {
    if (contacts_dirichlet && grid.is_dirichlet(id)) continue;
    m.free_of_node[id] = static_cast<int>(m.node_of_free.size());
    m.node_of_free.push_back(id);
  }
  m.volumes = node_weights(grid);
  return m;
}

}  // namespace detail

namespace {

Eigen::SparseMatrix<double> assemble_stiffness(const detail::Mesh& mesh,
                                               const std::vector<double>& t) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(5 * mesh.node_of_free.size());
  for (size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& face = mesh.faces[f];
    const double w = face.geom * t[f];
    const int fa = mesh.free_of_node[face.a];
    const int fb = mesh.free_of_node[face.b];
    if (fa >= 0) trips.emplace_back(fa, fa, w);
    if (fb >= 0) trips.emplace_back(fb, fb, w);
    if (fa >= 0 && fb >= 0) {
      trips.emplace_back(fa, fb, -w);
      trips.emplace_back(fb, fa, -w);
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<int>(mesh.node_of_free.size()),
                                static_cast<int>(mesh.node_of_free.size()));
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

Eigen::VectorXd cg_solve_generic(const Eigen::SparseMatrix<double>& A,
                                 const Eigen::VectorXd& b,
                                 const SolverOptions& opts, const char* who) {
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                           Eigen::Lower | Eigen::Upper>
      cg;
  cg.setTolerance(opts.linear_tol);
  cg.setMaxIterations(opts.linear_max_iter);
  cg.compute(A);
  Eigen::VectorXd x = cg.solve(b);
  if (cg.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << who << ": conjugate gradients hit the iteration limit ("
        << opts.linear_max_iter << "), relative residual " << cg.error();
    throw SolverError(msg.str(), cg.error());
  }
  return x;
}

Eigen::VectorXd boundary_values(const Grid& grid, const DirichletData& bc) {
  const int n = grid.n();
  if (bc.on_gamma0.segment != Segment::Gamma0 ||
      bc.on_gamma1.segment != Segment::Gamma1 || bc.on_gamma0.grid != grid ||
      bc.on_gamma1.grid != grid)
    throw DimensionError("dirichlet data does not match the grid");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(grid.num_nodes());
  for (int ix = 0; ix < n; ++ix) {
    u[grid.index(ix, 0)] = bc.on_gamma0.values[ix];
    u[grid.index(ix, n - 1)] = bc.on_gamma1.values[ix];
  }
  return u;
}

// exp with argument clamped to [-80, 80]; sets *clamped when active
inline double exp_clamped(double v, bool* clamped) {
  if (v > 80.0) {
    *clamped = true;
    v = 80.0;
  } else if (v < -80.0) {
    *clamped = true;
    v = -80.0;
  }
  return std::exp(v);
}

}  // namespace

DiffusionOperator::DiffusionOperator(ScalarField kappa, SolverOptions opts)
    : kappa_(std::move(kappa)), opts_(opts) {
  require_finite(kappa_, "diffusion");
  opts_.validate();
  if (kappa_.values.minCoeff() <= 0.0)
    throw DomainError("diffusion: coefficient must be strictly positive");
  mesh_ = detail::build_mesh(kappa_.grid, /*contacts_dirichlet=*/true);
  const size_t nf = mesh_.faces.size();
  t_.resize(nf);
  da_.resize(nf);
  db_.resize(nf);
  for (size_t f = 0; f < nf; ++f) {
    const double ka = kappa_.values[mesh_.faces[f].a];
    const double kb = kappa_.values[mesh_.faces[f].b];
    const double s = ka + kb;
    t_[f] = 2.0 * ka * kb / s;
    da_[f] = 2.0 * kb * kb / (s * s);
    db_[f] = 2.0 * ka * ka / (s * s);
  }
  A_ = assemble_stiffness(mesh_, t_);
}

Eigen::VectorXd DiffusionOperator::cg_solve(const Eigen::VectorXd& b) const {
  return cg_solve_generic(A_, b, opts_, "diffusion");
}

ScalarField DiffusionOperator::solve(const DirichletData& bc,
                                     const ScalarField* source) const {
  const Grid& grid = mesh_.grid;
  Eigen::VectorXd full = boundary_values(grid, bc);
  Eigen::VectorXd b =
      Eigen::VectorXd::Zero(static_cast<int>(mesh_.node_of_free.size()));
  if (source != nullptr) {
    require_finite(*source, "diffusion source");
    if (source->grid != grid)
      throw DimensionError("diffusion: source grid mismatch");
    for (size_t k = 0; k < mesh_.node_of_free.size(); ++k) {
      const int id = mesh_.node_of_free[k];
      b[static_cast<int>(k)] = -mesh_.volumes[id] * source->values[id];
    }
  }
  for (size_t f = 0; f < mesh_.faces.size(); ++f) {
    const auto& face = mesh_.faces[f];
    const double w = face.geom * t_[f];
    const int fa = mesh_.free_of_node[face.a];
    const int fb = mesh_.free_of_node[face.b];
    if (fa >= 0 && fb < 0) b[fa] += w * full[face.b];
    if (fb >= 0 && fa < 0) b[fb] += w * full[face.a];
  }
  const Eigen::VectorXd x = cg_solve(b);
  for (size_t k = 0; k < mesh_.node_of_free.size(); ++k)
    full[mesh_.node_of_free[k]] = x[static_cast<int>(k)];
  return ScalarField{grid, std::move(full)};
}

ScalarField DiffusionOperator::solve_zero_dirichlet(
    const Eigen::VectorXd& load) const {
  const Grid& grid = mesh_.grid;
  if (load.size() != grid.num_nodes())
    throw DimensionError("diffusion: load size mismatch");
  Eigen::VectorXd b(static_cast<int>(mesh_.node_of_free.size()));
  for (size_t k = 0; k < mesh_.node_of_free.size(); ++k)
    b[static_cast<int>(k)] = load[mesh_.node_of_free[k]];
  const Eigen::VectorXd x = cg_solve(b);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(grid.num_nodes());
  for (size_t k = 0; k < mesh_.node_of_free.size(); ++k)
    full[mesh_.node_of_free[k]] = x[static_cast<int>(k)];
  return ScalarField{grid, std::move(full)};
}

Eigen::VectorXd DiffusionOperator::derivative_load(
    const Eigen::VectorXd& eta, const Eigen::VectorXd& u_full) const {
  const int total = mesh_.grid.num_nodes();
  if (eta.size() != total || u_full.size() != total)
    throw DimensionError("derivative_load: size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(total);
  for (size_t f = 0; f < mesh_.faces.size(); ++f) {
    const auto& face = mesh_.faces[f];
    const double dt = da_[f] * eta[face.a] + db_[f] * eta[face.b];
    const double v = face.geom * dt * (u_full[face.b] - u_full[face.a]);
    out[face.a] += v;
    out[face.b] -= v;
  }
  return out;
}

Eigen::VectorXd DiffusionOperator::derivative_adjoint(
    const Eigen::VectorXd& u_full, const Eigen::VectorXd& w_full) const {
  const int total = mesh_.grid.num_nodes();
  if (u_full.size() != total || w_full.size() != total)
    throw DimensionError("derivative_adjoint: size mismatch");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(total);
  for (size_t f = 0; f < mesh_.faces.size(); ++f) {
    const auto& face = mesh_.faces[f];
    const double prod = face.geom * (u_full[face.b] - u_full[face.a]) *
                        (w_full[face.b] - w_full[face.a]);
    out[face.a] -= da_[f] * prod;
    out[face.b] -= db_[f] * prod;
  }
  return out;
}

double DiffusionOperator::boundary_flux(const ScalarField& u,
                                        Segment seg) const {
  if (seg != Segment::Gamma0 && seg != Segment::Gamma1)
    throw DomainError("boundary_flux: only the contacts are supported");
  if (u.grid != mesh_.grid) throw DimensionError("boundary_flux: grid mismatch");
  const Grid& grid = mesh_.grid;
  double flux = 0.0;
  for (size_t f = 0; f < mesh_.faces.size(); ++f) {
    const auto& face = mesh_.faces[f];
    const double w = mesh_.faces[f].geom * t_[f];
    const double d = u.values[face.b] - u.values[face.a];
    if (grid.segment_of(face.a) == seg) flux -= w * d;
    if (grid.segment_of(face.b) == seg) flux += w * d;
  }
  return flux;
}

ScalarField solve_equilibrium_potential(const ScalarField& doping,
                                        const ModelParams& params,
                                        CarrierMode mode,
                                        const SolverOptions& opts,
                                        EquilibriumReport* report,
                                        const DirichletData* bc_override) {
  require_finite(doping, "equilibrium");
  params.validate();
  opts.validate();
  const Grid& grid = doping.grid;
  const detail::Mesh mesh = detail::build_mesh(grid, true);
  const std::vector<double> unit_t(mesh.faces.size(), 1.0);
  const Eigen::SparseMatrix<double> A = assemble_stiffness(mesh, unit_t);
  const double lam2 = params.lambda * params.lambda;

  EquilibriumReport local;
  EquilibriumReport& rep = report ? *report : local;
  rep = EquilibriumReport{};
  bool clamped = false;

  const bool bipolar = (mode == CarrierMode::bipolar);
  auto g = [&](double v) {
    return bipolar ? exp_clamped(v, &clamped) - exp_clamped(-v, &clamped)
                   : exp_clamped(v, &clamped);
  };
  auto gp = [&](double v) {
    return bipolar ? exp_clamped(v, &clamped) + exp_clamped(-v, &clamped)
                   : exp_clamped(v, &clamped);
  };

  // start from the pointwise charge-neutral potential
  Eigen::VectorXd V(grid.num_nodes());
  for (int id = 0; id < grid.num_nodes(); ++id)
    V[id] = builtin_potential_value(doping.values[id], params.n_i);
  if (bc_override != nullptr) {
    const Eigen::VectorXd bv = boundary_values(grid, *bc_override);
    for (int id = 0; id < grid.num_nodes(); ++id)
      if (grid.is_dirichlet(id)) V[id] = bv[id];
  }

  const int nfree = static_cast<int>(mesh.node_of_free.size());
  auto residual = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd bal = Eigen::VectorXd::Zero(grid.num_nodes());
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
      const auto& face = mesh.faces[f];
      const double d = face.geom * (v[face.b] - v[face.a]);
      bal[face.a] += d;
      bal[face.b] -= d;
    }
    Eigen::VectorXd r(nfree);
    for (int k = 0; k < nfree; ++k) {
      const int id = mesh.node_of_free[k];
      r[k] = lam2 * bal[id] / mesh.volumes[id] - g(v[id]) + doping.values[id];
    }
    return r;
  };

  Eigen::VectorXd r = residual(V);
  double rnorm = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
  rep.residual_history.push_back(rnorm);

  while (rnorm > opts.newton_tol) {
    if (rep.newton_iterations >= opts.newton_max_iter)
      throw NonconvergenceError(
          "equilibrium: Newton iteration limit reached, residual " +
              std::to_string(rnorm),
          static_cast<int>(rep.residual_history.size()));
    // Jacobian lam^2 Lap - g'(V); g' > 0 keeps it negative definite, so the
    // volume-scaled system below is SPD.
    Eigen::SparseMatrix<double> J = lam2 * A;
    Eigen::VectorXd diag_add(nfree), rhs(nfree);
    for (int k = 0; k < nfree; ++k) {
      const int id = mesh.node_of_free[k];
      const double gpv = gp(V[id]);
      if (!(gpv > 0.0))
        throw DomainError("equilibrium: nonpositive g' encountered");
      diag_add[k] = mesh.volumes[id] * gpv;
      rhs[k] = mesh.volumes[id] * r[k];
    }
    for (int k = 0; k < nfree; ++k) J.coeffRef(k, k) += diag_add[k];
    const Eigen::VectorXd delta = cg_solve_generic(J, rhs, opts, "equilibrium");

    double omega = 1.0;
    Eigen::VectorXd V_try, r_try;
    double rnorm_try = 0.0;
    for (;;) {
      V_try = V;
      for (int k = 0; k < nfree; ++k)
        V_try[mesh.node_of_free[k]] += omega * delta[k];
      r_try = residual(V_try);
      rnorm_try = r_try.cwiseAbs().maxCoeff();
      if (rnorm_try <= (1.0 - 1e-4 * omega) * rnorm) break;
      omega *= 0.5;
      if (omega < 1e-4)
        throw NonconvergenceError(
            "equilibrium: Newton step rejected down to the damping floor",
            static_cast<int>(rep.residual_history.size()));
    }
    V.swap(V_try);
    r.swap(r_try);
    rnorm = rnorm_try;
    rep.residual_history.push_back(rnorm);
    ++rep.newton_iterations;
  }
  rep.clamp_activated = clamped;
  return ScalarField{grid, std::move(V)};
}

ScalarField solve_screened_neumann(double alpha, const ScalarField& rhs,
                                   const SolverOptions& opts) {
  require_finite(rhs, "screened solve");
  if (!(alpha > 0.0)) throw DomainError("screened solve: alpha must be positive");
  const Grid& grid = rhs.grid;
  const detail::Mesh mesh = detail::build_mesh(grid, false);
  const std::vector<double> unit_t(mesh.faces.size(), 1.0);
  Eigen::SparseMatrix<double> A = assemble_stiffness(mesh, unit_t);
  A *= alpha;
  for (int id = 0; id < grid.num_nodes(); ++id)
    A.coeffRef(id, id) += alpha * mesh.volumes[id];
  const Eigen::VectorXd b = mesh.volumes.cwiseProduct(rhs.values);
  Eigen::VectorXd w = cg_solve_generic(A, b, opts, "screened solve");
  return ScalarField{grid, std::move(w)};
}

ScalarField apply_screened_neumann(double alpha, const ScalarField& w) {
  require_finite(w, "screened apply");
  const Grid& grid = w.grid;
  const detail::Mesh mesh = detail::build_mesh(grid, false);
  Eigen::VectorXd bal = Eigen::VectorXd::Zero(grid.num_nodes());
  for (const auto& face : mesh.faces) {
    const double d = face.geom * (w.values[face.b] - w.values[face.a]);
    bal[face.a] += d;
    bal[face.b] -= d;
  }
  Eigen::VectorXd out(grid.num_nodes());
  for (int id = 0; id < grid.num_nodes(); ++id)
    out[id] = alpha * (w.values[id] - bal[id] / mesh.volumes[id]);
  return ScalarField{grid, std::move(out)};
}

}  // namespace dopinv
