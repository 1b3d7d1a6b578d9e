#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "tresca/mesh.hpp"

namespace tresca {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// A closed-form scalar function of position together with its gradient.
struct ScalarFunction {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;

  double operator()(const Point& x) const { return value(x); }
};

ScalarFunction constant_function(double c);

/// Throws MeshMismatchError unless the field has one entry per vertex.
void require_on_mesh(const Mesh& mesh, const ScalarField& u, std::string_view name);
void require_on_mesh(const Mesh& mesh, const VectorField& v, std::string_view name);

/// K_ij = sum_T area(T) (C_T grad phi_j) . grad phi_i. An empty coefficient
/// span means the identity. Throws AssemblyError on a non-SPD coefficient.
SparseMatrix assemble_stiffness(const Mesh& mesh,
                                std::span<const Eigen::Matrix2d> coeff = {});

/// Consistent P1 mass matrix with optional per-element positive weight.
SparseMatrix assemble_mass(const Mesh& mesh, std::span<const double> weight = {});

/// K + M with identity coefficient and unit weight: the H1 Gram matrix.
SparseMatrix assemble_h1(const Mesh& mesh);

/// L = M f for nodal data.
Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f);

/// L_i = int f phi_i with a degree-4 triangle rule on the closed form.
Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarFunction& f);

/// L_i = int f(x + t V(x)) det(I + t grad V) phi_i, i.e. the load of the mesh
/// deformed by t V pulled back to this mesh.
Eigen::VectorXd assemble_transported_load(const Mesh& mesh, const ScalarFunction& f,
                                          const VectorField& velocity, double t);

/// c_b = g(b) * weight(b) for every boundary node b. Throws DataError if g <= 0
/// at a boundary node.
Eigen::VectorXd boundary_lumped_weights(const Mesh& mesh, const ScalarField& g);
Eigen::VectorXd boundary_lumped_weights(const Mesh& mesh, const ScalarFunction& g);

/// Preconditioned conjugate gradients; ||A x - rhs|| <= tol ||rhs||.
Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& rhs,
                          double tol = 1e-12, int max_iterations = 20000);

/// Symmetric elimination of prescribed nodal values: rows and columns of the
/// fixed nodes are zeroed, their diagonal set to one, and the right-hand side
/// lifted accordingly.
void apply_dirichlet(SparseMatrix& a, Eigen::VectorXd& rhs, const std::vector<char>& fixed,
                     const Eigen::VectorXd& values);

/// q(b) = [(A u)_b - L_b] / weight(b): the discrete normal flux that makes the
/// divergence identity hold exactly on the boundary span.
Eigen::VectorXd recover_boundary_flux(const Mesh& mesh, const SparseMatrix& form,
                                      const ScalarField& u, const Eigen::VectorXd& load);
/// Same with the H1 form and the nodal load M f.
Eigen::VectorXd recover_boundary_flux(const Mesh& mesh, const ScalarField& u,
                                      const ScalarField& f);

/// Exact elementwise gradients of the P1 interpolant, one column per triangle.
Eigen::Matrix2Xd gradient_p1(const Mesh& mesh, const ScalarField& u);
/// Area-weighted average of adjacent element gradients.
VectorField node_gradient(const Mesh& mesh, const ScalarField& u);
/// Per-element Jacobian (row i = grad V_i) of a P1 vector field.
std::vector<Eigen::Matrix2d> element_jacobians(const Mesh& mesh, const VectorField& v);

double h1_inner(const Mesh& mesh, const ScalarField& u, const ScalarField& v);
double h1_norm(const Mesh& mesh, const ScalarField& u);
double h1_inner(const SparseMatrix& gram, const ScalarField& u, const ScalarField& v);
double h1_norm(const SparseMatrix& gram, const ScalarField& u);

ScalarField interpolate(const std::function<double(const Point&)>& f, const Mesh& mesh);
VectorField interpolate_vector(const std::function<Point(const Point&)>& f,
                               const Mesh& mesh);

}  // namespace tresca
