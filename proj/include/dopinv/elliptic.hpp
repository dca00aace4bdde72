#ifndef DOPINV_ELLIPTIC_HPP
#define DOPINV_ELLIPTIC_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <vector>

#include "dopinv/grid.hpp"
#include "dopinv/params.hpp"

namespace dopinv {

struct SolverOptions {
  double newton_tol = 1e-10;   ///< sup-norm of the nonlinear residual
  int newton_max_iter = 50;
  double linear_tol = 1e-10;   ///< relative 2-norm tolerance of the CG solve
  int linear_max_iter = 20000;

  void validate() const {
    if (!(newton_tol > 0.0) || !(linear_tol > 0.0) || newton_max_iter <= 0 ||
        linear_max_iter <= 0)
      throw ConfigError("solver options must be positive");
  }
};

/// Dirichlet data on the two contacts; the lateral edges always carry
/// homogeneous Neumann conditions.
struct DirichletData {
  BoundaryTrace on_gamma0;
  BoundaryTrace on_gamma1;
};

DirichletData dirichlet_from_field(const ScalarField& f);
DirichletData dirichlet_constant(const Grid& grid, double v0, double v1);

namespace detail {

/// Dual-cell face between two adjacent nodes. `geom` is face length over
/// node distance: 1 inside, 1/2 where the dual cell is halved at an edge.
struct Face {
  int a, b;
  double geom;
};

struct Mesh {
  Grid grid;
  std::vector<Face> faces;
  std::vector<int> free_of_node;  ///< -1 on constrained (Dirichlet) nodes
  std::vector<int> node_of_free;
  Eigen::VectorXd volumes;  ///< dual-cell areas (equal to node_weights)
};

Mesh build_mesh(const Grid& grid, bool contacts_dirichlet);

}  // namespace detail

/// Assembled conservative five-point discretization of div(kappa grad u)
/// on the unit square with Dirichlet contacts and insulating sides.
/// Face coefficients are harmonic means of the nodal kappa values, so
/// fluxes stay continuous across the coefficient jumps produced by
/// piecewise-constant reconstructions. The assembled matrix is SPD and
/// solved by diagonally preconditioned conjugate gradients.
class DiffusionOperator {
 public:
  DiffusionOperator(ScalarField kappa, SolverOptions opts = {});

  const Grid& grid() const { return mesh_.grid; }
  const ScalarField& kappa() const { return kappa_; }

  /// Solve div(kappa grad u) = source with u = bc on the contacts.
  /// A null source means source == 0.
  ScalarField solve(const DirichletData& bc,
                    const ScalarField* source = nullptr) const;

  /// Solve A u = load (zero Dirichlet data). The load is given per node in
  /// the assembled (volume-scaled) units; entries on contact nodes are
  /// ignored. Used by the derivative and adjoint plumbing.
  ScalarField solve_zero_dirichlet(const Eigen::VectorXd& load) const;

  /// Directional derivative of the assembled balance with respect to kappa:
  /// load_i = sum_faces geom * dt_f[eta] * (u_b - u_a), the right-hand side
  /// of the linearized solve A u' = load.
  Eigen::VectorXd derivative_load(const Eigen::VectorXd& eta,
                                  const Eigen::VectorXd& u_full) const;

  /// Exact transpose of derivative_load in the kappa slot:
  /// out_i = -sum_{faces at i} geom * (dt_f/dkappa_i) (u_b-u_a)(w_b-w_a),
  /// the discrete counterpart of -grad(u).grad(w) with the harmonic-mean
  /// chain rule applied.
  Eigen::VectorXd derivative_adjoint(const Eigen::VectorXd& u_full,
                                     const Eigen::VectorXd& w_full) const;

  /// Conservative (variational) outward flux through a contact. Telescopes
  /// exactly: the sum over both contacts vanishes up to the linear-solver
  /// residual when the source is zero.
  double boundary_flux(const ScalarField& u, Segment seg) const;

 private:
  ScalarField kappa_;
  SolverOptions opts_;
  detail::Mesh mesh_;
  std::vector<double> t_;   // face transmissibilities (harmonic means)
  std::vector<double> da_;  // d t / d kappa_a
  std::vector<double> db_;  // d t / d kappa_b
  Eigen::SparseMatrix<double> A_;

  Eigen::VectorXd cg_solve(const Eigen::VectorXd& b) const;
};

struct EquilibriumReport {
  int newton_iterations = 0;
  std::vector<double> residual_history;
  bool clamp_activated = false;
};

/// Damped-Newton solve of the equilibrium Poisson problem
///   lambda^2 Lap V = g(V) - C,  V = V_bi on the contacts, insulated sides,
/// with g(v) = e^v - e^{-v} (bipolar) or e^v (unipolar). The built-in
/// potential is derived from the doping unless bc_override is given.
/// Exponentials are evaluated with the argument clamped to [-80, 80]; any
/// clamp activation is reported, never silent.
ScalarField solve_equilibrium_potential(const ScalarField& doping,
                                        const ModelParams& params,
                                        CarrierMode mode,
                                        const SolverOptions& opts = {},
                                        EquilibriumReport* report = nullptr,
                                        const DirichletData* bc_override = nullptr);

/// Solve alpha (I - Lap) w = rhs with homogeneous Neumann data on the whole
/// boundary (the H^1 smoothing solve of the level-set velocity).
ScalarField solve_screened_neumann(double alpha, const ScalarField& rhs,
                                   const SolverOptions& opts = {});

/// Apply alpha (I - Lap) to a field in the same discretization (check tool).
ScalarField apply_screened_neumann(double alpha, const ScalarField& w);

}  // namespace dopinv

#endif  // DOPINV_ELLIPTIC_HPP
