#include "tresca/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tresca/errors.hpp"

namespace tresca {

void validate(const OptimConfig& c) {
  if (!(c.tau > 0.0)) throw ConfigError("tau must be positive");
  if (!(c.mu > 0.0)) throw ConfigError("mu must be positive");
  if (!(c.lambda_target > 0.0)) throw ConfigError("lambda_target must be positive");
  if (!std::isfinite(c.p0)) throw ConfigError("p0 must be finite");
  if (!(c.penalty >= 0.0) || !std::isfinite(c.penalty))
    throw ConfigError("penalty must be finite and non-negative");
  if (c.max_outer < 0) throw ConfigError("max_outer must be non-negative");
  if (!(c.stop_tol > 0.0)) throw ConfigError("stop_tol must be positive");
  if (c.check_every < 1) throw ConfigError("check_every must be at least 1");
  if (!(c.beta > 0.0)) throw ConfigError("beta must be positive");
  if (!(c.bbox.xmin < c.bbox.xmax) || !(c.bbox.ymin < c.bbox.ymax))
    throw ConfigError("bbox must be non-empty");
}

GradientData gradient_data(const Mesh& mesh, const State& state, const ProblemData& data,
                           EnergyKind kind, GradientForm form, CurvatureMethod curvature,
                           const ViOptions& opt) {
  GradientData g;
  g.form = form;
  if (form == GradientForm::Volume) {
    g.functional = shape_gradient_functional(mesh, state.u, data, kind);
  } else {
    g.geometry = boundary_geometry(mesh, curvature);
    g.density = shape_gradient_density(mesh, state.u, state.flux, data, kind, g.geometry, opt);
  }
  return g;
}

VectorField area_gradient(const Mesh& mesh) {
  VectorField n = VectorField::Zero(2, mesh.num_vertices());
  for (Eigen::Index e = 0; e < mesh.boundary_edges().cols(); ++e) {
    const int p = mesh.boundary_edges()(0, e), q = mesh.boundary_edges()(1, e);
    const Point t = mesh.vertex(q) - mesh.vertex(p);
    // Half the length-weighted outward normal goes to each end of the edge.
    const Point half(0.5 * t.y(), -0.5 * t.x());
    n.col(p) += half;
    n.col(q) += half;
  }
  return n;
}

VectorField descent_direction(const Mesh& mesh, const GradientData& grad, double p,
                              const ViOptions& opt) {
  if (grad.form == GradientForm::Volume)
    return solve_vector_h1(mesh, -(grad.functional + p * area_gradient(mesh)), opt);
  const Eigen::VectorXd rho = -(grad.density.array() + p).matrix();
  return solve_vector_neumann(mesh, rho, opt);
}

double augmented_derivative(const Mesh& mesh, const GradientData& grad, double p,
                            const VectorField& velocity) {
  if (grad.form == GradientForm::Volume)
    return (grad.functional + p * area_gradient(mesh)).cwiseProduct(velocity).sum();
  const Eigen::VectorXd shifted = (grad.density.array() + p).matrix();
  return boundary_pairing(mesh, shifted, grad.geometry, velocity);
}

namespace {

void count_statuses(HistoryRow& row, const State& s, EnergyKind kind, const ViOptions& opt) {
  std::vector<BoundaryStatus> st;
  if (kind == EnergyKind::Tresca)
    st = s.report.status;
  else
    st = statuses_of(s.problem, s.u, opt);
  for (BoundaryStatus b : st) {
    row.stick += b == BoundaryStatus::Stick;
    row.slip_plus += b == BoundaryStatus::SlipPlus;
    row.slip_minus += b == BoundaryStatus::SlipMinus;
  }
}

}  // namespace

OptimResult optimize(const Mesh& mesh0, const OptimConfig& config, const IterationHook& hook) {
  validate(config);
  const ProblemData data = builtin_problem_data(config.beta);
  OptimResult res;
  res.mesh = mesh0;
  double p = config.p0;
  if (config.max_outer == 0) return res;

  auto augmented = [&](double j, double a, double mult) {
    return j + mult * (a - config.lambda_target);
  };

  require_inside(res.mesh, config.bbox);
  State state = solve_state(res.mesh, data, config.problem, config.vi);
  for (int iter = 1; iter <= config.max_outer; ++iter) {
    if (hook) hook(iter, res.mesh, state);
    HistoryRow row;
    row.iter = iter;
    row.energy = state.energy;
    const double area_before = area(res.mesh);
    const double step_p = p + config.penalty * (area_before - config.lambda_target);
    row.p = step_p;
    count_statuses(row, state, config.problem, config.vi);
    row.aug_before = augmented(state.energy, area_before, step_p);

    VectorField v;
    try {
      const GradientData grad = gradient_data(res.mesh, state, data, config.problem,
                                              config.gradient_form, config.curvature, config.vi);
      v = descent_direction(res.mesh, grad, step_p, config.vi);
    } catch (const SolverError& e) {
      res.failed = true;
      res.message = std::string(e.what()) + " at iteration " + std::to_string(iter);
      return res;
    }

    double tau = config.tau;
    Mesh next;
    bool moved = false;
    for (int halving = 0; halving <= 10; ++halving) {
      try {
        next = deform_mesh(res.mesh, v, tau);
        moved = true;
        break;
      } catch (const InversionError&) {
        tau *= 0.5;
      }
    }
    if (!moved) {
      res.failed = true;
      res.message = "mesh inverted after 10 step halvings at iteration " + std::to_string(iter);
      return res;
    }
    try {
      require_inside(next, config.bbox);
    } catch (const GeometryError& e) {
      res.failed = true;
      res.message = std::string(e.what()) + " at iteration " + std::to_string(iter);
      return res;
    }
    res.mesh = std::move(next);
    row.tau = tau;
    row.area = area(res.mesh);
    row.min_angle = quality(res.mesh).min_angle * 180.0 / std::numbers::pi;
    p = uzawa_update(p, config.mu, row.area, config.lambda_target);

    try {
      state = solve_state(res.mesh, data, config.problem, config.vi);
    } catch (const SolverError& e) {
      res.failed = true;
      res.message = std::string(e.what()) + " at iteration " + std::to_string(iter);
      return res;
    }
    row.aug_after = augmented(state.energy, row.area, row.p);
    res.history.push_back(row);

    const int k = static_cast<int>(res.history.size());
    if (k % config.check_every == 0 && k > config.check_every) {
      const double previous = res.history[k - 1 - config.check_every].energy;
      if (std::abs(row.energy - previous) < config.stop_tol) {
        res.converged = true;
        res.message = "energy change below stop_tol at iteration " + std::to_string(iter);
        return res;
      }
    }
  }
  res.message = "reached max_outer";
  return res;
}

namespace {

double point_segment(const Point& x, const Point& a, const Point& b) {
  const Point d = b - a;
  const double len2 = d.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((x - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (x - (a + s * d)).norm();
}

// Distance from every boundary vertex of `from` to the boundary polyline of `to`.
std::vector<double> one_sided(const Mesh& from, const Mesh& to) {
  std::vector<double> d;
  const auto& e = to.boundary_edges();
  for (int v : from.boundary_nodes()) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < e.cols(); ++k)
      best = std::min(best, point_segment(from.vertex(v), to.vertex(e(0, k)), to.vertex(e(1, k))));
    d.push_back(best);
  }
  return d;
}

}  // namespace

BoundaryDistance compare_boundaries(const Mesh& a, const Mesh& b) {
  const std::vector<double> ab = one_sided(a, b), ba = one_sided(b, a);
  BoundaryDistance out;
  double sum = 0.0;
  for (double x : ab) {
    out.hausdorff = std::max(out.hausdorff, x);
    sum += x;
  }
  for (double x : ba) {
    out.hausdorff = std::max(out.hausdorff, x);
    sum += x;
  }
  out.mean = sum / double(ab.size() + ba.size());
  return out;
}

double boundary_diameter(const Mesh& mesh) {
  double d = 0.0;
  const auto& nodes = mesh.boundary_nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      d = std::max(d, (mesh.vertex(nodes[i]) - mesh.vertex(nodes[j])).norm());
  return d;
}

}  // namespace tresca
