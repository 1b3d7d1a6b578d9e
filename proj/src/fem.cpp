#include "tresca/fem.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "tresca/element.hpp"
#include "tresca/errors.hpp"

namespace tresca {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

std::array<Point, 3> corners(const Mesh& mesh, Eigen::Index t) {
  return {mesh.vertex(mesh.triangles()(0, t)), mesh.vertex(mesh.triangles()(1, t)),
          mesh.vertex(mesh.triangles()(2, t))};
}

void scatter(Triplets& trip, const Mesh& mesh, Eigen::Index t,
             const Eigen::Matrix3d& block) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      trip.emplace_back(mesh.triangles()(i, t), mesh.triangles()(j, t), block(i, j));
}

SparseMatrix from_triplets(const Mesh& mesh, const Triplets& trip) {
  SparseMatrix a(mesh.num_vertices(), mesh.num_vertices());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

}  // namespace

ScalarFunction constant_function(double c) {
  return {[c](const Point&) { return c; }, [](const Point&) { return Point::Zero().eval(); }};
}

void require_on_mesh(const Mesh& mesh, const ScalarField& u, std::string_view name) {
  if (u.size() != mesh.num_vertices())
    throw MeshMismatchError(std::string(name) + " has " + std::to_string(u.size()) +
                            " values for a mesh with " +
                            std::to_string(mesh.num_vertices()) + " vertices");
}

void require_on_mesh(const Mesh& mesh, const VectorField& v, std::string_view name) {
  if (v.cols() != mesh.num_vertices())
    throw MeshMismatchError(std::string(name) + " has " + std::to_string(v.cols()) +
                            " vectors for a mesh with " +
                            std::to_string(mesh.num_vertices()) + " vertices");
}

SparseMatrix assemble_stiffness(const Mesh& mesh, std::span<const Eigen::Matrix2d> coeff) {
  if (!coeff.empty() && static_cast<Eigen::Index>(coeff.size()) != mesh.num_triangles())
    throw MeshMismatchError("stiffness coefficient needs one matrix per triangle");
  Triplets trip;
  trip.reserve(9 * mesh.num_triangles());
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    Eigen::Matrix2d c = Eigen::Matrix2d::Identity();
    if (!coeff.empty()) {
      c = coeff[t];
      const double scale = 1.0 + c.cwiseAbs().maxCoeff();
      if (std::abs(c(0, 1) - c(1, 0)) > 1e-12 * scale)
        throw AssemblyError("coefficient of triangle " + std::to_string(t) +
                            " is not symmetric");
      const double lo = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(c).eigenvalues()[0];
      if (lo < -1e-12)
        throw AssemblyError("coefficient of triangle " + std::to_string(t) +
                            " has eigenvalue " + std::to_string(lo));
    }
    const auto p = corners(mesh, t);
    scatter(trip, mesh, t, p1_stiffness<double>(p[0], p[1], p[2], c));
  }
  return from_triplets(mesh, trip);
}

SparseMatrix assemble_mass(const Mesh& mesh, std::span<const double> weight) {
  if (!weight.empty() && static_cast<Eigen::Index>(weight.size()) != mesh.num_triangles())
    throw MeshMismatchError("mass weight needs one value per triangle");
  Triplets trip;
  trip.reserve(9 * mesh.num_triangles());
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    double w = 1.0;
    if (!weight.empty()) {
      w = weight[t];
      if (!(w > 0.0))
        throw AssemblyError("mass weight of triangle " + std::to_string(t) +
                            " is not positive");
    }
    scatter(trip, mesh, t, p1_mass<double>(w * mesh.triangle_area(t)));
  }
  return from_triplets(mesh, trip);
}

SparseMatrix assemble_h1(const Mesh& mesh) {
  Triplets trip;
  trip.reserve(9 * mesh.num_triangles());
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = corners(mesh, t);
    scatter(trip, mesh, t,
            p1_stiffness<double>(p[0], p[1], p[2], Eigen::Matrix2d::Identity()) +
                p1_mass<double>(mesh.triangle_area(t)));
  }
  return from_triplets(mesh, trip);
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarField& f) {
  require_on_mesh(mesh, f, "load data");
  return assemble_mass(mesh) * f;
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const ScalarFunction& f) {
  return assemble_transported_load(mesh, f, VectorField::Zero(2, mesh.num_vertices()), 0.0);
}

Eigen::VectorXd assemble_transported_load(const Mesh& mesh, const ScalarFunction& f,
                                          const VectorField& velocity, double t) {
  require_on_mesh(mesh, velocity, "velocity");
  const TriangleRule& rule = triangle_rule();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (Eigen::Index e = 0; e < mesh.num_triangles(); ++e) {
    Eigen::Matrix<double, 2, 3> x, v;
    for (int k = 0; k < 3; ++k) {
      x.col(k) = mesh.vertex(mesh.triangles()(k, e));
      v.col(k) = velocity.col(mesh.triangles()(k, e));
    }
    // The deformed triangle is spanned by the displaced corners.
    const Eigen::Matrix<double, 2, 3> y = x + t * v;
    const double mapped_area =
        signed_area<double>(y.col(0), y.col(1), y.col(2));
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Eigen::Vector3d lam(rule.points[q][0], rule.points[q][1], rule.points[q][2]);
      const double fq = f.value(y * lam);
      for (int k = 0; k < 3; ++k)
        load[mesh.triangles()(k, e)] += mapped_area * rule.weights[q] * fq * lam[k];
    }
  }
  return load;
}

Eigen::VectorXd boundary_lumped_weights(const Mesh& mesh, const ScalarField& g) {
  require_on_mesh(mesh, g, "friction threshold");
  const Eigen::VectorXd w = boundary_weights(mesh);
  Eigen::VectorXd c(w.size());
  for (Eigen::Index b = 0; b < w.size(); ++b) {
    const double gb = g[mesh.boundary_nodes()[b]];
    if (!(gb > 0.0))
      throw DataError("friction threshold is not positive at boundary node " +
                      std::to_string(mesh.boundary_nodes()[b]));
    c[b] = gb * w[b];
  }
  return c;
}

Eigen::VectorXd boundary_lumped_weights(const Mesh& mesh, const ScalarFunction& g) {
  return boundary_lumped_weights(mesh, interpolate(g.value, mesh));
}

Eigen::VectorXd solve_spd(const SparseMatrix& a, const Eigen::VectorXd& rhs, double tol,
                          int max_iterations) {
  if (a.rows() != a.cols() || a.rows() != rhs.size())
    throw MeshMismatchError("linear system dimensions disagree");
  if (rhs.squaredNorm() == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(max_iterations);
  cg.compute(a);
  Eigen::VectorXd x = cg.solve(rhs);
  double residual = (a * x - rhs).norm() / rhs.norm();
  // Eigen measures the recursive residual, which drifts from the true one on
  // poorly conditioned meshes; restarting from x recovers most of it. The
  // floor keeps tolerances near machine precision from rejecting good solves.
  const double accept = std::max(100.0 * tol, 1e-9);
  for (int restart = 0; restart < 3 && cg.info() == Eigen::Success && !(residual <= accept);
       ++restart) {
    x = cg.solveWithGuess(rhs, x);
    residual = (a * x - rhs).norm() / rhs.norm();
  }
  if (cg.info() != Eigen::Success || !(residual <= accept)) {
    std::ostringstream msg;
    msg << "conjugate gradients stopped at relative residual " << residual << " after "
        << cg.iterations() << " iterations";
    throw SolverError(msg.str(), residual);
  }
  return x;
}

void apply_dirichlet(SparseMatrix& a, Eigen::VectorXd& rhs, const std::vector<char>& fixed,
                     const Eigen::VectorXd& values) {
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      const Eigen::Index j = it.col();
      if (fixed[j] && !fixed[i]) rhs[i] -= it.value() * values[j];
      if (fixed[i] || fixed[j]) it.valueRef() = (i == j) ? 1.0 : 0.0;
    }
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    if (fixed[i]) rhs[i] = values[i];
  a.prune(0.0);
}

Eigen::VectorXd recover_boundary_flux(const Mesh& mesh, const SparseMatrix& form,
                                      const ScalarField& u, const Eigen::VectorXd& load) {
  require_on_mesh(mesh, u, "solution");
  require_on_mesh(mesh, load, "load");
  const Eigen::VectorXd r = form * u - load;
  const Eigen::VectorXd w = boundary_weights(mesh);
  Eigen::VectorXd q(w.size());
  for (Eigen::Index b = 0; b < w.size(); ++b) q[b] = r[mesh.boundary_nodes()[b]] / w[b];
  return q;
}

Eigen::VectorXd recover_boundary_flux(const Mesh& mesh, const ScalarField& u,
                                      const ScalarField& f) {
  return recover_boundary_flux(mesh, assemble_h1(mesh), u, assemble_load(mesh, f));
}

Eigen::Matrix2Xd gradient_p1(const Mesh& mesh, const ScalarField& u) {
  require_on_mesh(mesh, u, "field");
  Eigen::Matrix2Xd g(2, mesh.num_triangles());
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = corners(mesh, t);
    const Eigen::Vector3d ut(u[mesh.triangles()(0, t)], u[mesh.triangles()(1, t)],
                             u[mesh.triangles()(2, t)]);
    g.col(t) = p1_gradients<double>(p[0], p[1], p[2]) * ut;
  }
  return g;
}

VectorField node_gradient(const Mesh& mesh, const ScalarField& u) {
  const Eigen::Matrix2Xd ge = gradient_p1(mesh, u);
  VectorField g = VectorField::Zero(2, mesh.num_vertices());
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const double a = mesh.triangle_area(t);
    for (int k = 0; k < 3; ++k) {
      g.col(mesh.triangles()(k, t)) += a * ge.col(t);
      mass[mesh.triangles()(k, t)] += a;
    }
  }
  return g.array().rowwise() / mass.transpose().array();
}

std::vector<Eigen::Matrix2d> element_jacobians(const Mesh& mesh, const VectorField& v) {
  require_on_mesh(mesh, v, "vector field");
  const Eigen::Matrix2Xd g0 = gradient_p1(mesh, v.row(0).transpose());
  const Eigen::Matrix2Xd g1 = gradient_p1(mesh, v.row(1).transpose());
  std::vector<Eigen::Matrix2d> jac(mesh.num_triangles());
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    jac[t].row(0) = g0.col(t).transpose();
    jac[t].row(1) = g1.col(t).transpose();
  }
  return jac;
}

double h1_inner(const SparseMatrix& gram, const ScalarField& u, const ScalarField& v) {
  if (u.size() != gram.rows() || v.size() != gram.rows())
    throw MeshMismatchError("field size does not match the Gram matrix");
  return u.dot(gram * v);
}

double h1_norm(const SparseMatrix& gram, const ScalarField& u) {
  return std::sqrt(std::max(0.0, h1_inner(gram, u, u)));
}

double h1_inner(const Mesh& mesh, const ScalarField& u, const ScalarField& v) {
  require_on_mesh(mesh, u, "first field");
  require_on_mesh(mesh, v, "second field");
  return h1_inner(assemble_h1(mesh), u, v);
}

double h1_norm(const Mesh& mesh, const ScalarField& u) {
  require_on_mesh(mesh, u, "field");
  return h1_norm(assemble_h1(mesh), u);
}

ScalarField interpolate(const std::function<double(const Point&)>& f, const Mesh& mesh) {
  ScalarField u(mesh.num_vertices());
  for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = f(mesh.vertex(i));
  return u;
}

VectorField interpolate_vector(const std::function<Point(const Point&)>& f,
                               const Mesh& mesh) {
  VectorField v(2, mesh.num_vertices());
  for (Eigen::Index i = 0; i < v.cols(); ++i) v.col(i) = f(mesh.vertex(i));
  return v;
}

}  // namespace tresca
