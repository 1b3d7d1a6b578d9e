#include "tresca/shape_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tresca/element.hpp"
#include "tresca/errors.hpp"

namespace tresca {

namespace {

// Boundary trace entering the lumped friction term of each energy.
double friction_trace(EnergyKind kind, double ub) {
  switch (kind) {
    case EnergyKind::Tresca:
      return std::abs(ub);
    case EnergyKind::Neumann:
      return ub;
    case EnergyKind::Dirichlet:
      return 0.0;
  }
  return 0.0;
}

struct Corners {
  std::array<int, 3> idx;
  std::array<Point, 3> x;
  Eigen::Matrix<double, 2, 3> grad;  // basis gradients
  double area;
};

Corners corners(const Mesh& mesh, Eigen::Index t) {
  Corners c;
  for (int k = 0; k < 3; ++k) {
    c.idx[k] = mesh.triangles()(k, t);
    c.x[k] = mesh.vertex(c.idx[k]);
  }
  c.grad = p1_gradients<double>(c.x[0], c.x[1], c.x[2]);
  c.area = mesh.triangle_area(t);
  return c;
}

Eigen::VectorXd g_at_boundary(const Mesh& mesh, const ProblemData& data) {
  Eigen::VectorXd g(mesh.num_boundary_nodes());
  for (Eigen::Index b = 0; b < g.size(); ++b)
    g[b] = data.g.value(mesh.vertex(mesh.boundary_nodes()[b]));
  return g;
}

}  // namespace

DiscreteProblem state_problem(const Mesh& mesh, const ProblemData& data, EnergyKind kind) {
  DiscreteProblem p = make_problem(mesh, data.f);
  if (kind != EnergyKind::Dirichlet) p = with_friction(std::move(p), g_at_boundary(mesh, data));
  return p;
}

double tresca_energy(const DiscreteProblem& problem, const Eigen::VectorXd& u) {
  return discrete_energy(problem, u);
}

double compliance_energy(const DiscreteProblem& problem, const Eigen::VectorXd& u) {
  return -0.5 * u.dot(problem.form * u);
}

State solve_state(DiscreteProblem problem, EnergyKind kind, const ViOptions& opt) {
  State s;
  switch (kind) {
    case EnergyKind::Tresca: {
      TrescaSolution sol = solve_tresca_switching(problem, opt);
      s.u = std::move(sol.u);
      s.report = std::move(sol.report);
      s.energy = tresca_energy(problem, s.u);
      break;
    }
    case EnergyKind::Dirichlet:
      s.u = solve_dirichlet(problem, opt);
      s.energy = 0.5 * s.u.dot(problem.form * s.u) - problem.load.dot(s.u);
      break;
    case EnergyKind::Neumann: {
      const Eigen::VectorXd gn = -problem.friction.cwiseQuotient(problem.weight);
      s.u = solve_neumann(problem, gn, opt);
      double linear = 0.0;
      for (std::size_t b = 0; b < problem.boundary_nodes.size(); ++b)
        linear += problem.friction[b] * s.u[problem.boundary_nodes[b]];
      s.energy = 0.5 * s.u.dot(problem.form * s.u) + linear - problem.load.dot(s.u);
      break;
    }
  }
  s.flux = boundary_flux(problem, s.u);
  s.problem = std::move(problem);
  return s;
}

State solve_state(const Mesh& mesh, const ProblemData& data, EnergyKind kind,
                  const ViOptions& opt) {
  return solve_state(state_problem(mesh, data, kind), kind, opt);
}

EnergyAndSolution dirichlet_energy(const Mesh& mesh, const ProblemData& data,
                                   const ViOptions& opt) {
  State s = solve_state(mesh, data, EnergyKind::Dirichlet, opt);
  return {s.energy, std::move(s.u)};
}

EnergyAndSolution neumann_energy(const Mesh& mesh, const ProblemData& data,
                                 const ViOptions& opt) {
  State s = solve_state(mesh, data, EnergyKind::Neumann, opt);
  return {s.energy, std::move(s.u)};
}

int BoundaryClassification::count(BoundaryLabel l) const {
  return static_cast<int>(std::count(label.begin(), label.end(), l));
}

BoundaryClassification classify_boundary(const Mesh& mesh, const ScalarField& u,
                                         const Eigen::VectorXd& flux,
                                         const Eigen::VectorXd& g_boundary, double eps_u,
                                         double eps_g) {
  require_on_mesh(mesh, u, "solution");
  if (flux.size() != mesh.num_boundary_nodes() || g_boundary.size() != flux.size())
    throw MeshMismatchError("flux and threshold need one value per boundary node");
  BoundaryClassification c;
  c.eps_u = eps_u;
  c.eps_g = eps_g;
  c.label.resize(flux.size());
  for (Eigen::Index b = 0; b < flux.size(); ++b) {
    const double ub = u[mesh.boundary_nodes()[b]];
    const double q = flux[b], g = g_boundary[b];
    if (std::abs(ub) > eps_u)
      c.label[b] = BoundaryLabel::N;
    else if (q >= g - eps_g)
      c.label[b] = BoundaryLabel::SMinus;
    else if (q <= -g + eps_g)
      c.label[b] = BoundaryLabel::SPlus;
    else
      c.label[b] = BoundaryLabel::D;
  }
  return c;
}

BoundaryClassification classify_boundary(const Mesh& mesh, const ScalarField& u,
                                         const Eigen::VectorXd& flux,
                                         const Eigen::VectorXd& g_boundary) {
  require_on_mesh(mesh, u, "solution");
  const double umax = u.size() ? u.lpNorm<Eigen::Infinity>() : 0.0;
  const double gmax = g_boundary.size() ? g_boundary.lpNorm<Eigen::Infinity>() : 0.0;
  return classify_boundary(mesh, u, flux, g_boundary, std::max(1e-6 * umax, 1e-300),
                           std::max(1e-6 * gmax, 1e-300));
}

double shape_gradient_volume(const Mesh& mesh, const ScalarField& u, const ProblemData& data,
                             EnergyKind kind, const VectorField& velocity) {
  require_on_mesh(mesh, u, "solution");
  require_on_mesh(mesh, velocity, "velocity");
  const TriangleRule& rule = triangle_rule();
  double total = 0.0;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const Corners c = corners(mesh, t);
    const Eigen::Vector3d ut(u[c.idx[0]], u[c.idx[1]], u[c.idx[2]]);
    Eigen::Matrix<double, 2, 3> vt;
    for (int k = 0; k < 3; ++k) vt.col(k) = velocity.col(c.idx[k]);
    const Point gu = c.grad * ut;
    const Eigen::Matrix2d gv = vt * c.grad.transpose();  // row i = grad V_i
    total += c.area * (0.5 * gv.trace() * gu.squaredNorm() - gu.dot(gv * gu));
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Eigen::Vector3d lam(rule.points[q][0], rule.points[q][1], rule.points[q][2]);
      const Point xq = c.x[0] * lam[0] + c.x[1] * lam[1] + c.x[2] * lam[2];
      const double lap = ut.dot(lam) - data.f.value(xq);  // u - f stands for the Laplacian
      total -= c.area * rule.weights[q] * lap * (vt * lam).dot(gu);
    }
  }
  const EdgeRule& er = edge_rule();
  const Eigen::Index nb = mesh.num_boundary_nodes();
  for (Eigen::Index e = 0; e < nb; ++e) {
    const int p = mesh.boundary_edges()(0, e), q = mesh.boundary_edges()(1, e);
    const Point tan = mesh.vertex(q) - mesh.vertex(p);
    const double len = tan.norm();
    const Point n(tan.y() / len, -tan.x() / len);
    for (int k = 0; k < 3; ++k) {
      const double s = er.points[k];
      const Point x = (1 - s) * mesh.vertex(p) + s * mesh.vertex(q);
      const double us = (1 - s) * u[p] + s * u[q];
      const Point vs = (1 - s) * velocity.col(p) + s * velocity.col(q);
      total += len * er.weights[k] * vs.dot(n) * (0.5 * us * us - data.f.value(x) * us);
    }
  }
  if (kind != EnergyKind::Dirichlet) {
    const Eigen::VectorXd w = boundary_weights(mesh);
    for (Eigen::Index b = 0; b < nb; ++b) {
      const int v = mesh.boundary_nodes()[b];
      const int prev = mesh.boundary_edges()(0, (b + nb - 1) % nb);
      const int next = mesh.boundary_edges()(1, b);
      const Point tp = (mesh.vertex(v) - mesh.vertex(prev)).normalized();
      const Point tn = (mesh.vertex(next) - mesh.vertex(v)).normalized();
      // Rate of change of the lumped weight: half the stretching of both edges.
      const double dw = 0.5 * (tp.dot(velocity.col(v) - velocity.col(prev)) +
                               tn.dot(velocity.col(next) - velocity.col(v)));
      const double dc =
          data.g.gradient(mesh.vertex(v)).dot(velocity.col(v)) * w[b] +
          data.g.value(mesh.vertex(v)) * dw;
      total += dc * friction_trace(kind, u[v]);
    }
  }
  return total;
}

VectorField shape_gradient_functional(const Mesh& mesh, const ScalarField& u,
                                      const ProblemData& data, EnergyKind kind) {
  require_on_mesh(mesh, u, "solution");
  const TriangleRule& rule = triangle_rule();
  VectorField g = VectorField::Zero(2, mesh.num_vertices());
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const Corners c = corners(mesh, t);
    const Eigen::Vector3d ut(u[c.idx[0]], u[c.idx[1]], u[c.idx[2]]);
    const Point gu = c.grad * ut;
    Eigen::Vector3d weight_lap = Eigen::Vector3d::Zero();
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Eigen::Vector3d lam(rule.points[q][0], rule.points[q][1], rule.points[q][2]);
      const Point xq = c.x[0] * lam[0] + c.x[1] * lam[1] + c.x[2] * lam[2];
      weight_lap += rule.weights[q] * (ut.dot(lam) - data.f.value(xq)) * lam;
    }
    for (int k = 0; k < 3; ++k) {
      const Point gk = c.grad.col(k);
      g.col(c.idx[k]) += c.area * (0.5 * gu.squaredNorm() * gk - gk.dot(gu) * gu -
                                   weight_lap[k] * gu);
    }
  }
  const EdgeRule& er = edge_rule();
  const Eigen::Index nb = mesh.num_boundary_nodes();
  for (Eigen::Index e = 0; e < nb; ++e) {
    const int p = mesh.boundary_edges()(0, e), q = mesh.boundary_edges()(1, e);
    const Point tan = mesh.vertex(q) - mesh.vertex(p);
    const double len = tan.norm();
    const Point n(tan.y() / len, -tan.x() / len);
    double wp = 0.0, wq = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double s = er.points[k];
      const Point x = (1 - s) * mesh.vertex(p) + s * mesh.vertex(q);
      const double us = (1 - s) * u[p] + s * u[q];
      const double h = len * er.weights[k] * (0.5 * us * us - data.f.value(x) * us);
      wp += (1 - s) * h;
      wq += s * h;
    }
    g.col(p) += wp * n;
    g.col(q) += wq * n;
  }
  if (kind != EnergyKind::Dirichlet) {
    const Eigen::VectorXd w = boundary_weights(mesh);
    Eigen::VectorXd gt(nb);
    for (Eigen::Index b = 0; b < nb; ++b) {
      const int v = mesh.boundary_nodes()[b];
      const double tr = friction_trace(kind, u[v]);
      g.col(v) += data.g.gradient(mesh.vertex(v)) * w[b] * tr;
      gt[b] = data.g.value(mesh.vertex(v)) * tr;
    }
    for (Eigen::Index e = 0; e < nb; ++e) {
      const int p = mesh.boundary_edges()(0, e), q = mesh.boundary_edges()(1, e);
      const Point tau = (mesh.vertex(q) - mesh.vertex(p)).normalized();
      const double s = 0.5 * (gt[e] + gt[(e + 1) % nb]);
      g.col(q) += s * tau;
      g.col(p) -= s * tau;
    }
  }
  return g;
}

Eigen::VectorXd shape_gradient_density(const Mesh& mesh, const ScalarField& u,
                                       const Eigen::VectorXd& flux, const ProblemData& data,
                                       EnergyKind kind, const BoundaryGeometry& geo,
                                       const ViOptions& opt) {
  require_on_mesh(mesh, u, "solution");
  const Eigen::Index nb = mesh.num_boundary_nodes();
  if (geo.curvature.size() != nb) throw GeometryError("boundary curvature is missing");
  if (flux.size() != nb) throw MeshMismatchError("flux needs one value per boundary node");

  // Harmonic extension of the flux into the domain.
  std::vector<char> fixed(mesh.num_vertices(), 0);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (Eigen::Index b = 0; b < nb; ++b) {
    fixed[mesh.boundary_nodes()[b]] = 1;
    values[mesh.boundary_nodes()[b]] = flux[b];
  }
  SparseMatrix k = assemble_stiffness(mesh);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mesh.num_vertices());
  apply_dirichlet(k, rhs, fixed, values);
  const Eigen::VectorXd ext = solve_spd(k, rhs, opt.cg_tol, opt.cg_max_iterations);

  const VectorField gu = node_gradient(mesh, u);
  const VectorField gq = node_gradient(mesh, ext);
  Eigen::VectorXd d(nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    const int v = mesh.boundary_nodes()[b];
    const Point x = mesh.vertex(v);
    const Point n = geo.normal.col(b);
    const double ub = u[v], q = flux[b];
    const double g = data.g.value(x);
    const double dn_ext = gq.col(v).dot(n);
    const double dn_product = q * q + ub * dn_ext;  // d/dn (u q~) with du/dn = q
    const double dn_ratio = (dn_ext * g - q * data.g.gradient(x).dot(n)) / (g * g);
    const double h_term = kind == EnergyKind::Dirichlet
                              ? 0.0
                              : geo.curvature[b] * g * friction_trace(kind, ub);
    d[b] = 0.5 * (gu.col(v).squaredNorm() + ub * ub) - data.f.value(x) * ub + h_term -
           dn_product + g * ub * dn_ratio;
  }
  return d;
}

double boundary_pairing(const Mesh& mesh, const Eigen::VectorXd& density,
                        const BoundaryGeometry& geo, const VectorField& velocity) {
  require_on_mesh(mesh, velocity, "velocity");
  double s = 0.0;
  for (Eigen::Index b = 0; b < density.size(); ++b)
    s += density[b] * velocity.col(mesh.boundary_nodes()[b]).dot(geo.normal.col(b)) *
         geo.weight[b];
  return s;
}

PullbackCoefficients pullback_coefficients(const Mesh& mesh, const VectorField& velocity,
                                           double t) {
  const std::vector<Eigen::Matrix2d> jac = element_jacobians(mesh, velocity);
  PullbackCoefficients pc;
  pc.t = t;
  pc.a.resize(jac.size());
  pc.j.resize(static_cast<Eigen::Index>(jac.size()));
  std::vector<Eigen::Matrix2d> deformation(jac.size());
  for (std::size_t e = 0; e < jac.size(); ++e) {
    const auto pb = element_pullback<double>(jac[e], t);
    if (!(pb.jacobian > 0.0))
      throw InversionError("pullback is not admissible on triangle " + std::to_string(e),
                           pb.jacobian * mesh.triangle_area(static_cast<Eigen::Index>(e)));
    pc.a[e] = pb.coefficient;
    pc.j[e] = pb.jacobian;
    deformation[e] = pb.deformation;
  }
  const Eigen::Index nb = mesh.num_boundary_nodes();
  pc.j_edge.resize(nb);
  Eigen::VectorXd len(nb);
  for (Eigen::Index e = 0; e < nb; ++e) {
    const Point tan = mesh.vertex(mesh.boundary_edges()(1, e)) -
                      mesh.vertex(mesh.boundary_edges()(0, e));
    len[e] = tan.norm();
    const Point n(tan.y() / len[e], -tan.x() / len[e]);
    pc.j_edge[e] = tangential_jacobian<double>(deformation[mesh.boundary_edge_triangle(e)], n);
  }
  pc.j_node.resize(nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    const Eigen::Index prev = (b + nb - 1) % nb;
    pc.j_node[b] = (pc.j_edge[prev] * len[prev] + pc.j_edge[b] * len[b]) / (len[prev] + len[b]);
  }
  return pc;
}

DiscreteProblem perturbed_problem(const Mesh& mesh, const VectorField& velocity, double t,
                                  const ProblemData& data, EnergyKind kind) {
  const PullbackCoefficients pc = pullback_coefficients(mesh, velocity, t);
  DiscreteProblem p;
  p.form = assemble_stiffness(mesh, pc.a) +
           assemble_mass(mesh, std::span<const double>(pc.j.data(), pc.j.size()));
  p.load = assemble_transported_load(mesh, data.f, velocity, t);
  p.boundary_nodes = mesh.boundary_nodes();
  p.weight = boundary_weights(mesh).cwiseProduct(pc.j_node);
  if (kind != EnergyKind::Dirichlet) {
    Eigen::VectorXd g(p.weight.size());
    for (Eigen::Index b = 0; b < g.size(); ++b) {
      const int v = mesh.boundary_nodes()[b];
      g[b] = data.g.value(mesh.vertex(v) + t * velocity.col(v));
    }
    p = with_friction(std::move(p), g);
  }
  return p;
}

Eigen::VectorXd solve_perturbed_tresca(const Mesh& mesh, const VectorField& velocity,
                                       double t, const ProblemData& data,
                                       const ViOptions& opt) {
  return solve_tresca_switching(perturbed_problem(mesh, velocity, t, data, EnergyKind::Tresca),
                                opt)
      .u;
}

Eigen::VectorXd material_functional(const Mesh& mesh, const ScalarField& u,
                                    const Eigen::VectorXd& flux, const ProblemData& data,
                                    const VectorField& velocity) {
  require_on_mesh(mesh, u, "solution");
  require_on_mesh(mesh, velocity, "velocity");
  const TriangleRule& rule = triangle_rule();
  Eigen::VectorXd ell = Eigen::VectorXd::Zero(mesh.num_vertices());
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const Corners c = corners(mesh, t);
    const Eigen::Vector3d ut(u[c.idx[0]], u[c.idx[1]], u[c.idx[2]]);
    Eigen::Matrix<double, 2, 3> vt;
    for (int k = 0; k < 3; ++k) vt.col(k) = velocity.col(c.idx[k]);
    const Point gu = c.grad * ut;
    const Eigen::Matrix2d gv = vt * c.grad.transpose();
    const Eigen::Matrix2d da =
        -gv - gv.transpose() + gv.trace() * Eigen::Matrix2d::Identity();
    Eigen::Vector3d local = -c.area * c.grad.transpose() * (da * gu);
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const Eigen::Vector3d lam(rule.points[q][0], rule.points[q][1], rule.points[q][2]);
      const Point xq = c.x[0] * lam[0] + c.x[1] * lam[1] + c.x[2] * lam[2];
      const Point vq = vt * lam;
      const double lap = ut.dot(lam) - data.f.value(xq);
      local += c.area * rule.weights[q] *
               (vq.dot(gu) * lam + lap * (c.grad.transpose() * vq));
    }
    for (int k = 0; k < 3; ++k) ell[c.idx[k]] += local[k];
  }
  const EdgeRule& er = edge_rule();
  const Eigen::Index nb = mesh.num_boundary_nodes();
  for (Eigen::Index e = 0; e < nb; ++e) {
    const int p = mesh.boundary_edges()(0, e), q = mesh.boundary_edges()(1, e);
    const Point tan = mesh.vertex(q) - mesh.vertex(p);
    const double len = tan.norm();
    const Point n(tan.y() / len, -tan.x() / len);
    for (int k = 0; k < 3; ++k) {
      const double s = er.points[k];
      const Point x = (1 - s) * mesh.vertex(p) + s * mesh.vertex(q);
      const double us = (1 - s) * u[p] + s * u[q];
      const Point vs = (1 - s) * velocity.col(p) + s * velocity.col(q);
      const double h = len * er.weights[k] * vs.dot(n) * (data.f.value(x) - us);
      ell[p] += (1 - s) * h;
      ell[q] += s * h;
    }
  }
  const Eigen::VectorXd w = boundary_weights(mesh);
  for (Eigen::Index b = 0; b < nb; ++b) {
    const int v = mesh.boundary_nodes()[b];
    const int prev = mesh.boundary_edges()(0, (b + nb - 1) % nb);
    const int next = mesh.boundary_edges()(1, b);
    const Point tp = (mesh.vertex(v) - mesh.vertex(prev)).normalized();
    const Point tn = (mesh.vertex(next) - mesh.vertex(v)).normalized();
    const double div_gamma = 0.5 *
                             (tp.dot(velocity.col(v) - velocity.col(prev)) +
                              tn.dot(velocity.col(next) - velocity.col(v))) /
                             w[b];
    const double g = data.g.value(mesh.vertex(v));
    const double rate = data.g.gradient(mesh.vertex(v)).dot(velocity.col(v)) / g + div_gamma;
    ell[v] += rate * flux[b] * w[b];
  }
  return ell;
}

ScalarField material_derivative(const Mesh& mesh, const ScalarField& u,
                                const Eigen::VectorXd& flux, const ProblemData& data,
                                const VectorField& velocity,
                                const BoundaryClassification& cls, const ViOptions& opt) {
  if (static_cast<Eigen::Index>(cls.label.size()) != mesh.num_boundary_nodes())
    throw MeshMismatchError("classification needs one label per boundary node");
  const Eigen::VectorXd ell = material_functional(mesh, u, flux, data, velocity);
  std::vector<Constraint> cons(cls.label.size());
  for (std::size_t b = 0; b < cons.size(); ++b) {
    switch (cls.label[b]) {
      case BoundaryLabel::N:
        cons[b] = Constraint::Free;
        break;
      case BoundaryLabel::D:
        cons[b] = Constraint::Eq0;
        break;
      case BoundaryLabel::SMinus:
        cons[b] = Constraint::Le0;
        break;
      case BoundaryLabel::SPlus:
        cons[b] = Constraint::Ge0;
        break;
    }
  }
  return solve_constrained_vi(assemble_h1(mesh), ell, mesh.boundary_nodes(), cons, opt);
}

ScalarField shape_directional_derivative(const Mesh& mesh, const ScalarField& u,
                                         const VectorField& velocity,
                                         const ScalarField& material) {
  require_on_mesh(mesh, material, "material derivative");
  require_on_mesh(mesh, velocity, "velocity");
  const VectorField gu = node_gradient(mesh, u);
  return material - gu.cwiseProduct(velocity).colwise().sum().transpose();
}

std::vector<FdRow> fd_shape_gradient(const Mesh& mesh, const ProblemData& data,
                                     EnergyKind kind, const VectorField& velocity,
                                     const std::vector<double>& t_list,
                                     const ViOptions& opt) {
  const State s0 = solve_state(mesh, data, kind, opt);
  const double formula = shape_gradient_volume(mesh, s0.u, data, kind, velocity);
  std::vector<FdRow> rows;
  for (double t : t_list) {
    FdRow r;
    r.t = t;
    r.formula = formula;
    try {
      const Mesh moved = deform_mesh(mesh, velocity, t);
      const double jt = solve_state(moved, data, kind, opt).energy;
      r.quotient = (jt - s0.energy) / t;
      r.gap = std::abs(r.quotient - formula);
    } catch (const InversionError&) {
      r.ok = false;
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<FdRow> fd_shape_gradient_pullback(const Mesh& mesh, const ProblemData& data,
                                              EnergyKind kind, const VectorField& velocity,
                                              const std::vector<double>& t_list,
                                              const ViOptions& opt) {
  const State s0 = solve_state(mesh, data, kind, opt);
  const double formula = shape_gradient_volume(mesh, s0.u, data, kind, velocity);
  std::vector<FdRow> rows;
  for (double t : t_list) {
    FdRow r;
    r.t = t;
    r.formula = formula;
    try {
      const double jt =
          solve_state(perturbed_problem(mesh, velocity, t, data, kind), kind, opt).energy;
      r.quotient = (jt - s0.energy) / t;
      r.gap = std::abs(r.quotient - formula);
    } catch (const InversionError&) {
      r.ok = false;
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<MaterialFdRow> fd_material_derivative(const Mesh& mesh, const ProblemData& data,
                                                  const VectorField& velocity,
                                                  const std::vector<double>& t_list,
                                                  const ViOptions& opt) {
  const State s0 = solve_state(mesh, data, EnergyKind::Tresca, opt);
  const BoundaryClassification cls =
      classify_boundary(mesh, s0.u, s0.flux, g_at_boundary(mesh, data));
  const ScalarField md = material_derivative(mesh, s0.u, s0.flux, data, velocity, cls, opt);
  std::vector<MaterialFdRow> rows;
  for (double t : t_list) {
    MaterialFdRow r;
    r.t = t;
    try {
      const Eigen::VectorXd ut = solve_perturbed_tresca(mesh, velocity, t, data, opt);
      r.gap = h1_norm(s0.problem.form, (ut - s0.u) / t - md);
    } catch (const InversionError&) {
      r.ok = false;
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace tresca
