#include "tresca/vi_solve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>

#include "tresca/errors.hpp"

namespace tresca {

DiscreteProblem make_problem(const Mesh& mesh, const ScalarFunction& f) {
  return {assemble_h1(mesh), assemble_load(mesh, f), mesh.boundary_nodes(),
          boundary_weights(mesh), {}};
}

DiscreteProblem make_problem(const Mesh& mesh, const ScalarField& f) {
  return {assemble_h1(mesh), assemble_load(mesh, f), mesh.boundary_nodes(),
          boundary_weights(mesh), {}};
}

DiscreteProblem with_friction(DiscreteProblem problem, const Eigen::VectorXd& g_boundary) {
  if (g_boundary.size() != problem.weight.size())
    throw MeshMismatchError("friction threshold needs one value per boundary node");
  for (Eigen::Index b = 0; b < g_boundary.size(); ++b)
    if (!(g_boundary[b] > 0.0))
      throw DataError("friction threshold is not positive at boundary node " +
                      std::to_string(problem.boundary_nodes[b]));
  problem.friction = g_boundary.cwiseProduct(problem.weight);
  return problem;
}

Eigen::VectorXd boundary_values(const Mesh& mesh, const ScalarField& g) {
  require_on_mesh(mesh, g, "boundary data");
  Eigen::VectorXd out(mesh.num_boundary_nodes());
  for (Eigen::Index b = 0; b < out.size(); ++b) out[b] = g[mesh.boundary_nodes()[b]];
  return out;
}

namespace {

double friction_term(const DiscreteProblem& p, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index b = 0; b < p.friction.size(); ++b)
    s += p.friction[b] * std::abs(v[p.boundary_nodes[b]]);
  return s;
}

Eigen::VectorXd solve_fixed(const SparseMatrix& form, Eigen::VectorXd rhs,
                            const std::vector<char>& fixed, const ViOptions& opt) {
  SparseMatrix a = form;
  apply_dirichlet(a, rhs, fixed, Eigen::VectorXd::Zero(rhs.size()));
  return solve_spd(a, rhs, opt.cg_tol, opt.cg_max_iterations);
}

void require_friction(const DiscreteProblem& p) {
  if (p.friction.size() != static_cast<Eigen::Index>(p.boundary_nodes.size()))
    throw DataError("friction problem needs one weight per boundary node");
}

// Monotone FISTA with function-value restart for min 1/2 x'Ax - b'x + h(x),
// where prox(x, s) is the proximal map of s*h. Stops when the gradient
// mapping falls below map_tol in the max norm.
Eigen::VectorXd accelerated_prox(const SparseMatrix& a, const Eigen::VectorXd& b,
                                 const std::function<void(Eigen::VectorXd&, double)>& prox,
                                 const std::function<double(const Eigen::VectorXd&)>& h,
                                 double map_tol, int max_iterations, int* iterations) {
  const double lip = 1.05 * spectral_bound(a);
  if (!(lip > 0.0)) throw ViSolverError("operator has no positive spectrum", 0.0);
  const double step = 1.0 / lip;
  auto energy = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& av) {
    return 0.5 * v.dot(av) - b.dot(v) + h(v);
  };
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  prox(x, step);
  Eigen::VectorXd ax = a * x;
  Eigen::VectorXd y = x, ay = ax;
  double t = 1.0;
  for (int k = 1; k <= max_iterations; ++k) {
    Eigen::VectorXd z = y - step * (ay - b);
    prox(z, step);
    const double mapping = lip * (z - y).lpNorm<Eigen::Infinity>();
    Eigen::VectorXd az = a * z;
    if (mapping <= map_tol) {
      if (iterations) *iterations = k;
      return z;
    }
    // Gradient restart: drop the momentum once it points against the
    // proximal step. Unlike an energy test this stays meaningful below the
    // round-off floor of the energy.
    if ((y - z).dot(z - x) > 0.0) {
      t = 1.0;
      y = x;
      ay = ax;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    y = z + beta * (z - x);
    ay = az + beta * (az - ax);
    x = std::move(z);
    ax = std::move(az);
    t = t_next;
  }
  if (iterations) *iterations = max_iterations;
  throw ViSolverError("accelerated proximal gradient hit the iteration cap", energy(x, ax));
}

}  // namespace

double discrete_energy(const DiscreteProblem& p, const Eigen::VectorXd& v) {
  return 0.5 * v.dot(p.form * v) - p.load.dot(v) + friction_term(p, v);
}

Eigen::VectorXd boundary_flux(const DiscreteProblem& p, const Eigen::VectorXd& v) {
  const Eigen::VectorXd r = p.form * v - p.load;
  Eigen::VectorXd q(p.weight.size());
  for (Eigen::Index b = 0; b < q.size(); ++b) q[b] = r[p.boundary_nodes[b]] / p.weight[b];
  return q;
}

Eigen::VectorXd solve_dirichlet(const DiscreteProblem& p, const ViOptions& opt) {
  std::vector<char> fixed(p.size(), 0);
  for (int v : p.boundary_nodes) fixed[v] = 1;
  return solve_fixed(p.form, p.load, fixed, opt);
}

Eigen::VectorXd solve_neumann(const DiscreteProblem& p, const Eigen::VectorXd& gn,
                              const ViOptions& opt) {
  if (gn.size() != p.weight.size())
    throw MeshMismatchError("Neumann data needs one value per boundary node");
  Eigen::VectorXd rhs = p.load;
  for (Eigen::Index b = 0; b < gn.size(); ++b) rhs[p.boundary_nodes[b]] += gn[b] * p.weight[b];
  return solve_spd(p.form, rhs, opt.cg_tol, opt.cg_max_iterations);
}

std::vector<BoundaryStatus> statuses_of(const DiscreteProblem& p, const Eigen::VectorXd& u,
                                        const ViOptions& opt) {
  const double eps_u = opt.eps_u * (1.0 + u.lpNorm<Eigen::Infinity>());
  std::vector<BoundaryStatus> s(p.boundary_nodes.size(), BoundaryStatus::Stick);
  for (std::size_t b = 0; b < s.size(); ++b) {
    const double ub = u[p.boundary_nodes[b]];
    if (ub > eps_u) s[b] = BoundaryStatus::SlipPlus;
    if (ub < -eps_u) s[b] = BoundaryStatus::SlipMinus;
  }
  return s;
}

namespace {

double switching_residual(const DiscreteProblem& p, const Eigen::VectorXd& u,
                          const std::vector<BoundaryStatus>& s) {
  const Eigen::VectorXd q = boundary_flux(p, u);
  double r = 0.0;
  for (std::size_t b = 0; b < s.size(); ++b) {
    const double ub = u[p.boundary_nodes[b]];
    switch (s[b]) {
      case BoundaryStatus::Stick:
        r = std::max(r, std::abs(std::min(p.friction[b] - std::abs(q[b] * p.weight[b]), 0.0)));
        break;
      case BoundaryStatus::SlipPlus:
        r = std::max(r, std::max(-ub, 0.0));
        break;
      case BoundaryStatus::SlipMinus:
        r = std::max(r, std::max(ub, 0.0));
        break;
    }
  }
  return r;
}

}  // namespace

TrescaSolution solve_tresca_switching(const DiscreteProblem& p, const ViOptions& opt,
                                      std::optional<std::vector<BoundaryStatus>> init) {
  require_friction(p);
  const std::size_t nb = p.boundary_nodes.size();
  std::vector<BoundaryStatus> status =
      init ? *init : std::vector<BoundaryStatus>(nb, BoundaryStatus::Stick);
  if (status.size() != nb) throw MeshMismatchError("initial status has the wrong length");

  std::set<std::vector<BoundaryStatus>> seen;
  TrescaSolution sol;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    if (!seen.insert(status).second) break;  // cycling
    Eigen::VectorXd rhs = p.load;
    std::vector<char> fixed(p.size(), 0);
    for (std::size_t b = 0; b < nb; ++b) {
      const int v = p.boundary_nodes[b];
      if (status[b] == BoundaryStatus::Stick) fixed[v] = 1;
      if (status[b] == BoundaryStatus::SlipPlus) rhs[v] -= p.friction[b];
      if (status[b] == BoundaryStatus::SlipMinus) rhs[v] += p.friction[b];
    }
    const Eigen::VectorXd u = solve_fixed(p.form, rhs, fixed, opt);
    const Eigen::VectorXd q = boundary_flux(p, u);
    const double eps_u = opt.eps_u * (1.0 + u.lpNorm<Eigen::Infinity>());
    bool changed = false;
    std::vector<BoundaryStatus> next = status;
    for (std::size_t b = 0; b < nb; ++b) {
      const double g = p.friction[b] / p.weight[b];
      const double ub = u[p.boundary_nodes[b]];
      switch (status[b]) {
        case BoundaryStatus::Stick:
          if (q[b] > g + opt.eps) next[b] = BoundaryStatus::SlipMinus;
          if (q[b] < -g - opt.eps) next[b] = BoundaryStatus::SlipPlus;
          break;
        case BoundaryStatus::SlipPlus:
          if (ub < -eps_u) next[b] = BoundaryStatus::Stick;
          break;
        case BoundaryStatus::SlipMinus:
          if (ub > eps_u) next[b] = BoundaryStatus::Stick;
          break;
      }
      changed = changed || next[b] != status[b];
    }
    if (!changed) {
      sol.u = u;
      sol.report.outer_iterations = it;
      sol.report.status = status;
      sol.report.residual = switching_residual(p, u, status);
      sol.report.energy = discrete_energy(p, u);
      sol.report.converged = sol.report.residual <= opt.tol;
      if (sol.report.converged) return sol;
      break;
    }
    status = std::move(next);
    sol.report.outer_iterations = it;
  }

  const int outer = sol.report.outer_iterations;
  try {
    sol = solve_tresca_proximal(p, opt);
  } catch (const ViSolverError& e) {
    throw ViSolverError(std::string("switching did not settle and the fallback failed: ") +
                            e.what(),
                        e.residual());
  }
  sol.report.outer_iterations = outer;
  sol.report.by_fallback = true;
  return sol;
}

TrescaSolution solve_tresca_proximal(const DiscreteProblem& p, const ViOptions& opt) {
  require_friction(p);
  const std::vector<int>& nodes = p.boundary_nodes;
  auto prox = [&](Eigen::VectorXd& x, double step) {
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      double& v = x[nodes[b]];
      const double shrink = step * p.friction[b];
      v = std::copysign(std::max(std::abs(v) - shrink, 0.0), v);
    }
  };
  auto h = [&](const Eigen::VectorXd& x) { return friction_term(p, x); };
  // The gradient mapping is in load units; dividing by the smallest boundary
  // weight turns it into a flux error.
  const double map_tol = 1e-2 * opt.tol * p.weight.minCoeff();
  TrescaSolution sol;
  sol.u = accelerated_prox(p.form, p.load, prox, h, map_tol, opt.prox_max_iterations,
                           &sol.report.outer_iterations);
  sol.report.status = statuses_of(p, sol.u, opt);
  sol.report.energy = discrete_energy(p, sol.u);
  sol.report.residual = tresca_law_residual(p, sol.u);
  sol.report.converged = true;
  return sol;
}

Eigen::VectorXd check_tresca_law(const DiscreteProblem& p, const Eigen::VectorXd& u) {
  require_friction(p);
  const Eigen::VectorXd q = boundary_flux(p, u);
  Eigen::VectorXd r(q.size());
  for (Eigen::Index b = 0; b < q.size(); ++b) {
    const double g = p.friction[b] / p.weight[b];
    const double ub = u[p.boundary_nodes[b]];
    r[b] = std::max(std::abs(q[b]) - g, 0.0) + std::abs(ub * q[b] + g * std::abs(ub));
  }
  return r;
}

double tresca_law_residual(const DiscreteProblem& p, const Eigen::VectorXd& u) {
  return check_tresca_law(p, u).maxCoeff();
}

double constrained_vi_kkt(const SparseMatrix& a, const Eigen::VectorXd& rhs,
                          const std::vector<int>& nodes,
                          const std::vector<Constraint>& constraints,
                          const Eigen::VectorXd& v) {
  Eigen::VectorXd r = a * v - rhs;
  for (std::size_t b = 0; b < nodes.size(); ++b) {
    const int i = nodes[b];
    switch (constraints[b]) {
      case Constraint::Free:
        break;
      case Constraint::Eq0:
        r[i] = v[i];
        break;
      case Constraint::Le0:
        r[i] = std::max(v[i], r[i]);
        break;
      case Constraint::Ge0:
        r[i] = std::min(v[i], r[i]);
        break;
    }
  }
  return r.lpNorm<Eigen::Infinity>();
}

namespace {

void require_constraints(const SparseMatrix& a, const Eigen::VectorXd& rhs,
                         const std::vector<int>& nodes,
                         const std::vector<Constraint>& constraints) {
  if (rhs.size() != a.rows()) throw MeshMismatchError("functional has the wrong length");
  if (constraints.size() != nodes.size())
    throw MeshMismatchError("need one constraint per boundary node");
}

}  // namespace

Eigen::VectorXd solve_constrained_vi(const SparseMatrix& a, const Eigen::VectorXd& rhs,
                                     const std::vector<int>& nodes,
                                     const std::vector<Constraint>& constraints,
                                     const ViOptions& opt, ConstrainedViReport* report) {
  require_constraints(a, rhs, nodes, constraints);
  const std::size_t nb = nodes.size();
  const double scale = std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
  const double mult_tol = 1e-3 * opt.tol * scale;

  // Start from the feasible point 0 with every bound active.
  std::vector<char> active(nb);
  for (std::size_t b = 0; b < nb; ++b) active[b] = constraints[b] != Constraint::Free;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
  std::set<std::vector<char>> seen;
  bool single_release = false;

  const int max_it = std::max(opt.max_iterations, 4 * static_cast<int>(nb) + 10);
  for (int it = 1; it <= max_it; ++it) {
    std::vector<char> fixed(rhs.size(), 0);
    for (std::size_t b = 0; b < nb; ++b)
      if (active[b]) fixed[nodes[b]] = 1;
    const Eigen::VectorXd xhat = solve_fixed(a, rhs, fixed, opt);

    // Longest feasible step towards the subspace minimizer.
    double alpha = 1.0;
    for (std::size_t b = 0; b < nb; ++b) {
      if (active[b]) continue;
      const int i = nodes[b];
      const bool bad = (constraints[b] == Constraint::Le0 && xhat[i] > 0.0) ||
                       (constraints[b] == Constraint::Ge0 && xhat[i] < 0.0);
      if (bad) alpha = std::min(alpha, x[i] / (x[i] - xhat[i]));
    }
    if (alpha < 1.0) {
      x += alpha * (xhat - x);
      for (std::size_t b = 0; b < nb; ++b) {
        if (active[b]) continue;
        const int i = nodes[b];
        const bool hit = (constraints[b] == Constraint::Le0 && x[i] >= -1e-14 * scale) ||
                         (constraints[b] == Constraint::Ge0 && x[i] <= 1e-14 * scale);
        if (hit && constraints[b] != Constraint::Free) {
          active[b] = 1;
          x[i] = 0.0;
        }
      }
      continue;
    }
    x = xhat;

    const Eigen::VectorXd r = a * x - rhs;
    std::size_t worst = nb;
    double worst_val = 0.0;
    std::vector<std::size_t> violators;
    for (std::size_t b = 0; b < nb; ++b) {
      if (!active[b]) continue;
      const double rb = r[nodes[b]];
      double v = 0.0;
      if (constraints[b] == Constraint::Le0) v = rb;
      if (constraints[b] == Constraint::Ge0) v = -rb;
      if (v > mult_tol) {
        violators.push_back(b);
        if (v > worst_val) {
          worst_val = v;
          worst = b;
        }
      }
    }
    if (violators.empty()) {
      if (report) {
        report->iterations = it;
        report->kkt_residual = constrained_vi_kkt(a, rhs, nodes, constraints, x);
        report->by_fallback = false;
      }
      return x;
    }
    if (!seen.insert(active).second) single_release = true;
    if (single_release)
      active[worst] = 0;
    else
      for (std::size_t b : violators) active[b] = 0;
  }

  // Active set did not settle: use the projected-gradient solver instead.
  Eigen::VectorXd y =
      solve_constrained_vi_projected(a, rhs, nodes, constraints, 1e-3 * opt.tol);
  if (report) {
    report->iterations = max_it;
    report->kkt_residual = constrained_vi_kkt(a, rhs, nodes, constraints, y);
    report->by_fallback = true;
  }
  return y;
}

Eigen::VectorXd solve_constrained_vi_projected(const SparseMatrix& a,
                                               const Eigen::VectorXd& rhs,
                                               const std::vector<int>& nodes,
                                               const std::vector<Constraint>& constraints,
                                               double tol, int max_iterations) {
  require_constraints(a, rhs, nodes, constraints);
  auto project = [&](Eigen::VectorXd& x, double) {
    for (std::size_t b = 0; b < nodes.size(); ++b) {
      double& v = x[nodes[b]];
      switch (constraints[b]) {
        case Constraint::Free:
          break;
        case Constraint::Eq0:
          v = 0.0;
          break;
        case Constraint::Le0:
          v = std::min(v, 0.0);
          break;
        case Constraint::Ge0:
          v = std::max(v, 0.0);
          break;
      }
    }
  };
  auto zero = [](const Eigen::VectorXd&) { return 0.0; };
  const double scale = std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
  return accelerated_prox(a, rhs, project, zero, tol * scale, max_iterations, nullptr);
}

VectorField solve_vector_h1(const Mesh& mesh, const VectorField& load, const ViOptions& opt) {
  require_on_mesh(mesh, load, "vector load");
  const SparseMatrix a = assemble_h1(mesh);
  VectorField v(2, mesh.num_vertices());
  for (int i = 0; i < 2; ++i)
    v.row(i) = solve_spd(a, load.row(i).transpose(), opt.cg_tol, opt.cg_max_iterations)
                   .transpose();
  return v;
}

VectorField solve_vector_neumann(const Mesh& mesh, const Eigen::VectorXd& rho,
                                 const ViOptions& opt) {
  if (rho.size() != mesh.num_boundary_nodes())
    throw MeshMismatchError("boundary density needs one value per boundary node");
  const BoundaryGeometry geo = boundary_geometry(mesh);
  VectorField load = VectorField::Zero(2, mesh.num_vertices());
  for (Eigen::Index b = 0; b < rho.size(); ++b)
    load.col(mesh.boundary_nodes()[b]) = rho[b] * geo.weight[b] * geo.normal.col(b);
  return solve_vector_h1(mesh, load, opt);
}

double spectral_bound(const SparseMatrix& a, int iterations) {
  Eigen::VectorXd x(a.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = 1.0 + 0.5 * std::sin(1.7 * double(i));
  x.normalize();
  double lambda = 0.0;
  for (int k = 0; k < iterations; ++k) {
    Eigen::VectorXd y = a * x;
    // |Ax| for unit x never undershoots the Rayleigh quotient.
    lambda = y.norm();
    if (lambda == 0.0) return 0.0;
    x = y / lambda;
  }
  return lambda;
}

}  // namespace tresca
