#pragma once

#include <Eigen/Core>
#include <vector>

#include "tresca/fem.hpp"
#include "tresca/mesh.hpp"
#include "tresca/problem_data.hpp"
#include "tresca/vi_solve.hpp"

namespace tresca {

/// Which energy is being differentiated. Tresca uses the friction law on the
/// whole boundary; Dirichlet imposes u = 0; Neumann imposes du/dn = -g.
enum class EnergyKind { Tresca, Dirichlet, Neumann };

/// Discrete problem of the given kind on a mesh, with the quadrature load of
/// the closed-form source. Tresca and Neumann carry c_b = g(b) weight(b).
DiscreteProblem state_problem(const Mesh& mesh, const ProblemData& data, EnergyKind kind);

struct State {
  DiscreteProblem problem;
  Eigen::VectorXd u;
  Eigen::VectorXd flux;  // recovered du/dn per boundary node
  double energy = 0.0;
  TrescaSolveReport report;  // filled for the Tresca kind
};

/// Solves the state equation of the given kind and evaluates its energy.
State solve_state(DiscreteProblem problem, EnergyKind kind, const ViOptions& opt = {});
State solve_state(const Mesh& mesh, const ProblemData& data, EnergyKind kind,
                  const ViOptions& opt = {});

/// 1/2 u'Au + sum c_b |u_b| - L'u.
double tresca_energy(const DiscreteProblem& problem, const Eigen::VectorXd& u);
/// -1/2 u'Au, equal to the energy at the minimizer.
double compliance_energy(const DiscreteProblem& problem, const Eigen::VectorXd& u);

struct EnergyAndSolution {
  double energy;
  Eigen::VectorXd w;
};
/// 1/2 |w|^2 - (f, w) with w = 0 on the boundary.
EnergyAndSolution dirichlet_energy(const Mesh& mesh, const ProblemData& data,
                                   const ViOptions& opt = {});
/// 1/2 |w|^2 + sum c_b w_b - (f, w) with dw/dn = -g.
EnergyAndSolution neumann_energy(const Mesh& mesh, const ProblemData& data,
                                 const ViOptions& opt = {});

enum class BoundaryLabel : int { N = 0, D = 1, SMinus = 2, SPlus = 3 };

struct BoundaryClassification {
  std::vector<BoundaryLabel> label;  // per boundary node
  double eps_u = 0.0;
  double eps_g = 0.0;

  int count(BoundaryLabel l) const;
};

/// N where |u| > eps_u; otherwise D, S- or S+ from the flux against g.
BoundaryClassification classify_boundary(const Mesh& mesh, const ScalarField& u,
                                         const Eigen::VectorXd& flux,
                                         const Eigen::VectorXd& g_boundary, double eps_u,
                                         double eps_g);
/// Same with the default tolerances 1e-6 max|u| and 1e-6 max g.
BoundaryClassification classify_boundary(const Mesh& mesh, const ScalarField& u,
                                         const Eigen::VectorXd& flux,
                                         const Eigen::VectorXd& g_boundary);

/// Volume form of the shape derivative of the energy of the given kind in
/// direction V. Boundary integrals of smooth terms use edge Gauss quadrature,
/// the friction term is differentiated in its lumped form.
double shape_gradient_volume(const Mesh& mesh, const ScalarField& u, const ProblemData& data,
                             EnergyKind kind, const VectorField& velocity);

/// G with sum(G .* W) == shape_gradient_volume(..., W) for every nodal W.
VectorField shape_gradient_functional(const Mesh& mesh, const ScalarField& u,
                                      const ProblemData& data, EnergyKind kind);

/// Boundary density D with J'(V) ~ sum_b D(b) V(b).n(b) weight(b).
Eigen::VectorXd shape_gradient_density(const Mesh& mesh, const ScalarField& u,
                                       const Eigen::VectorXd& flux, const ProblemData& data,
                                       EnergyKind kind, const BoundaryGeometry& geometry,
                                       const ViOptions& opt = {});

/// sum_b D(b) V(b).n(b) weight(b).
double boundary_pairing(const Mesh& mesh, const Eigen::VectorXd& density,
                        const BoundaryGeometry& geometry, const VectorField& velocity);

struct PullbackCoefficients {
  std::vector<Eigen::Matrix2d> a;  // per triangle
  Eigen::VectorXd j;               // per triangle
  Eigen::VectorXd j_edge;          // per boundary edge
  Eigen::VectorXd j_node;          // per boundary node, length-weighted edge mean
  double t = 0.0;
};

/// Throws InversionError when det(I + t grad V) <= 0 on some triangle.
PullbackCoefficients pullback_coefficients(const Mesh& mesh, const VectorField& velocity,
                                           double t);

/// The problem on mesh deformed by t V, written on the undeformed mesh.
DiscreteProblem perturbed_problem(const Mesh& mesh, const VectorField& velocity, double t,
                                  const ProblemData& data, EnergyKind kind);

Eigen::VectorXd solve_perturbed_tresca(const Mesh& mesh, const VectorField& velocity,
                                       double t, const ProblemData& data,
                                       const ViOptions& opt = {});

/// Right-hand side functional of the material derivative problem.
Eigen::VectorXd material_functional(const Mesh& mesh, const ScalarField& u,
                                    const Eigen::VectorXd& flux, const ProblemData& data,
                                    const VectorField& velocity);

/// Material directional derivative: the constrained VI with EQ0 on D, LE0 on
/// S-, GE0 on S+ and no constraint on N nodes.
ScalarField material_derivative(const Mesh& mesh, const ScalarField& u,
                                const Eigen::VectorXd& flux, const ProblemData& data,
                                const VectorField& velocity,
                                const BoundaryClassification& classification,
                                const ViOptions& opt = {});

/// u' = material - grad(u) . V with the node-averaged gradient.
ScalarField shape_directional_derivative(const Mesh& mesh, const ScalarField& u,
                                         const VectorField& velocity,
                                         const ScalarField& material);

struct FdRow {
  double t = 0.0;
  double quotient = 0.0;  // finite-difference quotient
  double formula = 0.0;
  double gap = 0.0;       // |quotient - formula|
  bool ok = true;         // false when the deformation inverted a triangle
};

/// [J(deform(mesh, V, t)) - J(mesh)] / t from independent solves.
std::vector<FdRow> fd_shape_gradient(const Mesh& mesh, const ProblemData& data,
                                     EnergyKind kind, const VectorField& velocity,
                                     const std::vector<double>& t_list,
                                     const ViOptions& opt = {});

/// Same quotients from fixed-mesh solves with pullback coefficients.
std::vector<FdRow> fd_shape_gradient_pullback(const Mesh& mesh, const ProblemData& data,
                                              EnergyKind kind, const VectorField& velocity,
                                              const std::vector<double>& t_list,
                                              const ViOptions& opt = {});

struct MaterialFdRow {
  double t = 0.0;
  double gap = 0.0;  // |(u_t - u_0)/t - material|_H1
  bool ok = true;
};

std::vector<MaterialFdRow> fd_material_derivative(const Mesh& mesh, const ProblemData& data,
                                                  const VectorField& velocity,
                                                  const std::vector<double>& t_list,
                                                  const ViOptions& opt = {});

}  // namespace tresca
