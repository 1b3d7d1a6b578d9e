#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "tresca/fem.hpp"
#include "tresca/mesh.hpp"

namespace tresca {

/// A discrete boundary-value problem on a fixed mesh: the SPD form, the load,
/// the lumped boundary measure used for flux recovery and, for friction
/// problems, the lumped nonsmooth weights c_b.
struct DiscreteProblem {
  SparseMatrix form;
  Eigen::VectorXd load;
  std::vector<int> boundary_nodes;
  Eigen::VectorXd weight;    // per boundary node
  Eigen::VectorXd friction;  // per boundary node, empty when unused

  Eigen::Index size() const { return load.size(); }
};

/// H1 form, quadrature load of the closed-form f, plain boundary weights.
DiscreteProblem make_problem(const Mesh& mesh, const ScalarFunction& f);
/// Same with the nodal load M f.
DiscreteProblem make_problem(const Mesh& mesh, const ScalarField& f);
/// Adds c_b = g(b) weight(b); throws DataError where g <= 0.
DiscreteProblem with_friction(DiscreteProblem problem, const Eigen::VectorXd& g_boundary);

/// g sampled at the boundary nodes of the mesh.
Eigen::VectorXd boundary_values(const Mesh& mesh, const ScalarField& g);

/// E(v) = 1/2 v'Av - L'v + sum_b c_b |v_b|.
double discrete_energy(const DiscreteProblem& problem, const Eigen::VectorXd& v);
/// q_b = (A v - L)_b / weight_b.
Eigen::VectorXd boundary_flux(const DiscreteProblem& problem, const Eigen::VectorXd& v);

struct ViOptions {
  double tol = 1e-9;          // acceptance tolerance of the complementarity residual
  int max_iterations = 100;   // switching / active-set outer iterations
  int prox_max_iterations = 400000;
  double eps = 1e-10;         // multiplier threshold
  double eps_u = 1e-12;       // relative sign threshold, scaled by 1 + max|u|
  double cg_tol = 1e-12;
  int cg_max_iterations = 20000;
};

enum class BoundaryStatus : int { Stick = 0, SlipPlus = 1, SlipMinus = 2 };

struct TrescaSolveReport {
  int outer_iterations = 0;
  std::vector<BoundaryStatus> status;
  bool converged = false;
  bool by_fallback = false;
  double energy = 0.0;
  double residual = 0.0;  // max complementarity residual
};

struct TrescaSolution {
  Eigen::VectorXd u;
  TrescaSolveReport report;
};

Eigen::VectorXd solve_dirichlet(const DiscreteProblem& problem, const ViOptions& opt = {});
/// (A u)_i = L_i + sum_b gN(b) weight(b) [i = b].
Eigen::VectorXd solve_neumann(const DiscreteProblem& problem,
                              const Eigen::VectorXd& gn_boundary,
                              const ViOptions& opt = {});

/// Status-switching iteration; falls back to the proximal solver on cycling
/// or when the iteration cap is reached.
TrescaSolution solve_tresca_switching(const DiscreteProblem& problem,
                                      const ViOptions& opt = {},
                                      std::optional<std::vector<BoundaryStatus>> init = {});

/// Monotone accelerated proximal gradient with adaptive restart.
TrescaSolution solve_tresca_proximal(const DiscreteProblem& problem,
                                     const ViOptions& opt = {});

/// Statuses read off a solution: sign of u where |u| > eps_u, else stick.
std::vector<BoundaryStatus> statuses_of(const DiscreteProblem& problem,
                                        const Eigen::VectorXd& u, const ViOptions& opt = {});

/// residual(b) = max(|q_b| - g_b, 0) + |u_b q_b + g_b |u_b||, g_b = c_b / weight_b.
Eigen::VectorXd check_tresca_law(const DiscreteProblem& problem, const Eigen::VectorXd& u);

/// Maximum of the same residual over the boundary.
double tresca_law_residual(const DiscreteProblem& problem, const Eigen::VectorXd& u);

enum class Constraint : int { Free = 0, Eq0 = 1, Le0 = 2, Ge0 = 3 };

struct ConstrainedViReport {
  int iterations = 0;
  double kkt_residual = 0.0;
  bool by_fallback = false;
};

/// min 1/2 v'Av - rhs'v subject to per-boundary-node sign constraints, by a
/// primal active-set method; the projected-gradient solver is the fallback.
Eigen::VectorXd solve_constrained_vi(const SparseMatrix& a, const Eigen::VectorXd& rhs,
                                     const std::vector<int>& boundary_nodes,
                                     const std::vector<Constraint>& constraints,
                                     const ViOptions& opt = {},
                                     ConstrainedViReport* report = nullptr);

/// Accelerated projected gradient for the same problem.
Eigen::VectorXd solve_constrained_vi_projected(const SparseMatrix& a,
                                               const Eigen::VectorXd& rhs,
                                               const std::vector<int>& boundary_nodes,
                                               const std::vector<Constraint>& constraints,
                                               double tol = 1e-12,
                                               int max_iterations = 400000);

/// max over KKT conditions (stationarity on free rows, sign of multipliers on
/// active rows, feasibility), in load units.
double constrained_vi_kkt(const SparseMatrix& a, const Eigen::VectorXd& rhs,
                          const std::vector<int>& boundary_nodes,
                          const std::vector<Constraint>& constraints,
                          const Eigen::VectorXd& v);

/// Componentwise H1 solves a(V_i, w) = sum_b rho_b n_i(b) weight_b w_b.
VectorField solve_vector_neumann(const Mesh& mesh, const Eigen::VectorXd& rho,
                                 const ViOptions& opt = {});
/// Riesz representative of a load given per vertex and component.
VectorField solve_vector_h1(const Mesh& mesh, const VectorField& load,
                            const ViOptions& opt = {});

/// Largest eigenvalue estimate of an SPD matrix by power iteration.
double spectral_bound(const SparseMatrix& a, int iterations = 100);

}  // namespace tresca
