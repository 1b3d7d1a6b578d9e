// Acceptance run: one PASS/FAIL line per criterion. Criteria listed with
// --allow-red may fail without failing the process; their lines still say FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "tresca/config.hpp"
#include "tresca/element.hpp"
#include "tresca/fem.hpp"
#include "tresca/optimize.hpp"
#include "tresca/problem_data.hpp"
#include "tresca/shape_calculus.hpp"
#include "tresca/vi_solve.hpp"

using namespace tresca;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[violated: " << what << "] ";
    }
  }
};

std::string fmt(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double h1_rel(const SparseMatrix& a, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const Eigen::VectorXd d = u - v;
  return std::sqrt(d.dot(a * d) / v.dot(a * v));
}

Mesh base_ellipse(int n_theta = 128, int n_rings = 32) {
  return generate_ellipse_mesh(kEllipseA, 1 / kEllipseA, n_theta, n_rings);
}

DiscreteProblem builtin(const Mesh& m, double beta) {
  return state_problem(m, builtin_problem_data(beta), EnergyKind::Tresca);
}

// Every converged Tresca solve of criteria 1-3 is recorded for criterion 4.
struct IdentityCheck {
  std::string label;
  double direct, compliance;
};
std::vector<IdentityCheck> identity_log;

TrescaSolution logged_switching(const DiscreteProblem& p, const std::string& label) {
  TrescaSolution s = solve_tresca_switching(p);
  if (s.report.converged)
    identity_log.push_back({label, tresca_energy(p, s.u), compliance_energy(p, s.u)});
  return s;
}

TrescaSolution logged_proximal(const DiscreteProblem& p, const std::string& label) {
  TrescaSolution s = solve_tresca_proximal(p);
  if (s.report.converged)
    identity_log.push_back({label, tresca_energy(p, s.u), compliance_energy(p, s.u)});
  return s;
}

void criterion1(Outcome& o) {
  const Mesh m = base_ellipse();
  const DiscreteProblem p = builtin(m, 0.49);
  const Eigen::VectorXd ud = solve_dirichlet(p);
  const Eigen::VectorXd q = boundary_flux(p, ud);
  double worst = 0.0;
  Eigen::Index at = 0;
  for (Eigen::Index b = 0; b < q.size(); ++b) {
    const double r = std::abs(q[b]) / (p.friction[b] / p.weight[b]);
    if (r > worst) worst = r, at = b;
  }
  const TrescaSolution st = logged_switching(p, "beta=0.49");
  const double gap = h1_rel(p.form, st.u, ud);
  const Point x = m.vertex(p.boundary_nodes[at]);
  o.detail << m.num_vertices() << " vertices; max |q|/g = " << fmt(worst, 4) << " at ("
           << fmt(x.x()) << ", " << fmt(x.y()) << "); H1 gap Tresca-Dirichlet = " << fmt(gap)
           << "; ";
  o.require(m.num_vertices() >= 2000, ">= 2k vertices");
  o.require(worst < 1.0, "|q| < g at every boundary node");
  o.require(gap <= 1e-8, "Tresca equals Dirichlet to 1e-8");
}

void criterion2(Outcome& o) {
  const Mesh m = base_ellipse();
  o.detail << m.num_vertices() << " vertices; ";
  for (double beta : {0.28, 0.1, 0.01}) {
    const auto t0 = std::chrono::steady_clock::now();
    const DiscreteProblem p = builtin(m, beta);
    const Eigen::VectorXd un = solve_neumann(p, -p.friction.cwiseQuotient(p.weight));
    double min_b = std::numeric_limits<double>::infinity();
    for (int v : p.boundary_nodes) min_b = std::min(min_b, un[v]);
    const TrescaSolution st = logged_switching(p, "beta=" + fmt(beta));
    const double gap = h1_rel(p.form, st.u, un);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.detail << "beta " << fmt(beta) << ": min u_N on boundary = " << fmt(min_b)
             << ", H1 gap = " << fmt(gap) << "; ";
    o.require(min_b > 0.0, "Neumann solution positive on the boundary at beta " + fmt(beta));
    o.require(gap <= 1e-8, "Tresca equals Neumann to 1e-8 at beta " + fmt(beta));
    o.require(secs <= 10.0, "runtime <= 10 s at beta " + fmt(beta));
  }
}

void criterion3(Outcome& o) {
  std::mt19937 rng(20240601);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), level(0.1, 0.6);
  const double tol = ViOptions{}.tol;
  double worst_gap = 0.0, worst_res = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Mesh m = testing::jittered_ellipse(rng, 24 + 4 * (trial % 4), 4 + trial % 4);
    o.require(m.num_vertices() <= 300, "coarse mesh <= 300 vertices");
    const double a0 = coef(rng), a1 = coef(rng), a2 = coef(rng), g0 = level(rng),
                 g1 = 0.5 * g0 * coef(rng);
    const ScalarField f = interpolate(
        [=](const Point& x) {
          return 1.0 + a0 * x.x() + a1 * std::sin(2 * x.y()) + a2 * x.x() * x.y();
        },
        m);
    const ScalarField g = interpolate([=](const Point& x) { return g0 + g1 * std::cos(x.x()); }, m);
    const DiscreteProblem p = with_friction(make_problem(m, f), boundary_values(m, g));
    const std::string label = "random " + std::to_string(trial);
    const TrescaSolution sw = logged_switching(p, label + " switching");
    const TrescaSolution px = logged_proximal(p, label + " proximal");
    worst_gap = std::max(worst_gap, h1_rel(p.form, sw.u, px.u));
    worst_res = std::max({worst_res, tresca_law_residual(p, sw.u), tresca_law_residual(p, px.u)});
  }
  o.detail << "max H1 gap " << fmt(worst_gap) << ", max Tresca-law residual " << fmt(worst_res)
           << " (tolerance " << fmt(tol) << "); ";
  o.require(worst_gap <= 1e-5, "solvers agree to 1e-5");
  o.require(worst_res <= 10 * tol, "residual <= 10x solver tolerance");
}

void criterion4(Outcome& o) {
  double worst = 0.0;
  for (const IdentityCheck& c : identity_log)
    worst = std::max(worst, std::abs(c.direct - c.compliance) / (1 + std::abs(c.direct)));
  o.detail << identity_log.size() << " converged solves; max |J - (-1/2|u|^2)|/(1+|J|) = "
           << fmt(worst) << "; ";
  o.require(!identity_log.empty(), "criteria 1-3 produced solves");
  o.require(worst <= 1e-8, "identity to 1e-8");
}

void criterion5(Outcome& o) {
  const Mesh m = base_ellipse(256, 40);
  const ProblemData d = builtin_problem_data(0.49);
  const std::vector<double> ladder{1e-2, 1e-3, 1e-4};
  o.detail << m.num_vertices() << " vertices; ";
  o.require(m.num_vertices() >= 4000, ">= 4k vertices");
  for (const std::string& name : velocity_names()) {
    const VectorField v = named_velocity(name, m);
    const auto rows = fd_shape_gradient(m, d, EnergyKind::Tresca, v, ladder);
    const auto pulled = fd_shape_gradient_pullback(m, d, EnergyKind::Tresca, v, ladder);
    const bool monotone = rows[0].ok && rows[1].ok && rows[2].ok && rows[1].gap < rows[0].gap &&
                          rows[2].gap < rows[1].gap;
    const double rel = rows[1].gap / std::abs(rows[1].formula);
    double pull = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k)
      pull = std::max(pull, std::abs(rows[k].quotient - pulled[k].quotient));
    o.detail << name << ": J'=" << fmt(rows[1].formula, 5) << " rel gaps " << fmt(rows[0].gap / std::abs(rows[0].formula)) << "/"
             << fmt(rel) << "/" << fmt(rows[2].gap / std::abs(rows[2].formula))
             << " pullback diff " << fmt(pull) << "; ";
    o.require(monotone, name + " gap decreasing");
    o.require(rel <= 0.02, name + " gap <= 2% at t=1e-3");
    o.require(pull <= 1e-8, name + " pullback FD equals deformed FD");
  }
}

double boundary_gap(const Mesh& m, const ProblemData& d, const VectorField& v, const State& s) {
  const BoundaryGeometry geo = boundary_geometry(m);
  const Eigen::VectorXd dens = shape_gradient_density(m, s.u, s.flux, d, EnergyKind::Tresca, geo);
  const double vol = shape_gradient_volume(m, s.u, d, EnergyKind::Tresca, v);
  return std::abs(boundary_pairing(m, dens, geo, v) - vol) / std::abs(vol);
}

void criterion6(Outcome& o) {
  const ProblemData d = builtin_problem_data(0.49);
  const Mesh m = base_ellipse(256, 40), fine = base_ellipse(512, 80);
  const State s = solve_state(m, d, EnergyKind::Tresca);
  const State sf = solve_state(fine, d, EnergyKind::Tresca);
  o.detail << m.num_vertices() << " -> " << fine.num_vertices() << " vertices; ";
  o.require(m.num_vertices() >= 4000, ">= 4k vertices");
  for (const std::string& name : velocity_names()) {
    const double g = boundary_gap(m, d, named_velocity(name, m), s);
    const double gf = boundary_gap(fine, d, named_velocity(name, fine), sf);
    o.detail << name << ": " << fmt(100 * g) << "% -> " << fmt(100 * gf) << "%; ";
    o.require(g <= 0.1, name + " within 10%");
    o.require(gf < g, name + " gap decreases under refinement");
  }
}

void criterion7(Outcome& o) {
  const Mesh m = base_ellipse(48, 8);
  const ProblemData d = builtin_problem_data(0.49);
  const State s = solve_state(m, d, EnergyKind::Tresca);
  const Eigen::VectorXd g = boundary_values(m, interpolate(d.g.value, m));
  const double umax = s.u.cwiseAbs().maxCoeff();
  const BoundaryClassification c = classify_boundary(m, s.u, s.flux, g);
  const SparseMatrix gram = assemble_h1(m);
  o.detail << m.num_vertices() << " vertices, labels N/D/S-/S+ = " << c.count(BoundaryLabel::N)
           << "/" << c.count(BoundaryLabel::D) << "/" << c.count(BoundaryLabel::SMinus) << "/"
           << c.count(BoundaryLabel::SPlus) << "; ";
  for (const std::string& name : velocity_names()) {
    const VectorField v = named_velocity(name, m);
    const ScalarField md = material_derivative(m, s.u, s.flux, d, v, c);
    const ScalarField md2 = material_derivative(m, s.u, s.flux, d, (2.0 * v).eval(), c);
    const double hom = h1_norm(gram, md2 - 2.0 * md) / h1_norm(gram, md);
    const auto ladder = fd_material_derivative(m, d, v, {1e-2, 1e-3, 1e-4});
    const bool decreasing = ladder[1].gap < ladder[0].gap && ladder[2].gap < ladder[1].gap;
    o.detail << name << ": FD gaps " << fmt(ladder[0].gap) << "/" << fmt(ladder[1].gap) << "/"
             << fmt(ladder[2].gap) << ", homogeneity " << fmt(hom) << "; ";
    o.require(decreasing, name + " FD gap decreasing");
    o.require(hom <= 1e-8, name + " positive homogeneity");
  }
  // nonlinearity witness: a classification with active slip sets
  const BoundaryClassification wide =
      classify_boundary(m, s.u, s.flux, g, 1e-6 * umax, 0.05 * g.maxCoeff());
  const int slip = wide.count(BoundaryLabel::SPlus) + wide.count(BoundaryLabel::SMinus);
  double best = 0.0;
  std::string which;
  for (const std::string& name : velocity_names()) {
    const VectorField v = named_velocity(name, m);
    const ScalarField plus = material_derivative(m, s.u, s.flux, d, v, wide);
    const ScalarField minus = material_derivative(m, s.u, s.flux, d, (-v).eval(), wide);
    const double odd = h1_norm(gram, minus + plus) / h1_norm(gram, plus);
    if (odd > best) best = odd, which = name;
  }
  o.detail << "witness (eps_g = 0.05 max g, " << slip << " slip nodes): |d(-V) + d(V)|/|d(V)| = "
           << fmt(best) << " for " << which << "; ";
  o.require(slip > 0, "witness has active slip nodes");
  o.require(best > 1e-6, "result(-V) != -result(V)");
}

struct RegimeRun {
  OptimResult result;
  double seconds;
};

RegimeRun regime_run(double beta, EnergyKind kind) {
  RunConfig c = parse_config("beta = " + format_double(beta) + "\n");
  c.optim.problem = kind;
  const auto t0 = std::chrono::steady_clock::now();
  OptimResult r = optimize(base_ellipse(c.n_theta, c.n_rings), c.optim);
  return {std::move(r),
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
}

void check_run(Outcome& o, const std::string& tag, const RegimeRun& run) {
  const OptimResult& r = run.result;
  double worst = -std::numeric_limits<double>::infinity();
  const std::size_t n = std::min<std::size_t>(50, r.history.size());
  for (std::size_t k = 0; k < n; ++k)
    worst = std::max(worst, r.history[k].aug_after - r.history[k].aug_before);
  const double area_err = std::abs(area(r.mesh) - pi) / pi;
  o.detail << tag << ": " << r.history.size() << " its (" << r.message << "), area err "
           << fmt(area_err) << ", max aug increase " << fmt(worst) << ", " << fmt(run.seconds)
           << " s; ";
  o.require(!r.failed, tag + " run completed");
  o.require(area_err <= 0.01, tag + " area within 1%");
  o.require(n == 50 && worst <= 1e-8, tag + " augmented energy non-increasing");
  o.require(run.seconds <= 900.0, tag + " runtime <= 15 min");
}

void criterion8(Outcome& o) {
  const std::pair<double, EnergyKind> pairs[] = {{0.49, EnergyKind::Dirichlet},
                                                 {0.01, EnergyKind::Neumann}};
  for (const auto& [beta, kind] : pairs) {
    const RegimeRun tresca = regime_run(beta, EnergyKind::Tresca);
    const RegimeRun classic = regime_run(beta, kind);
    const std::string name = kind == EnergyKind::Dirichlet ? "dirichlet" : "neumann";
    check_run(o, "tresca " + fmt(beta), tresca);
    check_run(o, name + " " + fmt(beta), classic);
    const BoundaryDistance dist = compare_boundaries(tresca.result.mesh, classic.result.mesh);
    const double rel = dist.hausdorff / boundary_diameter(tresca.result.mesh);
    o.detail << "Hausdorff/diameter = " << fmt(rel) << "; ";
    o.require(rel <= 0.05, "beta " + fmt(beta) + " shapes within 5% of the diameter");
  }
}

void criterion9(Outcome& o) {
  const Mesh m = base_ellipse();
  const SparseMatrix gram = assemble_h1(m);
  double worst = 0.0;
  for (double beta : reproduce_betas()) {
    const RunConfig c = parse_config("beta = " + format_double(beta) + "\n");
    const ProblemData d = builtin_problem_data(beta);
    const State s = solve_state(m, d, EnergyKind::Tresca);
    const GradientData g =
        gradient_data(m, s, d, EnergyKind::Tresca, c.optim.gradient_form, c.optim.curvature);
    const VectorField v = descent_direction(m, g, c.optim.p0);
    const double norm2 = v.row(0).dot(gram * v.row(0).transpose()) +
                         v.row(1).dot(gram * v.row(1).transpose());
    const double rel = std::abs(augmented_derivative(m, g, c.optim.p0, v) + norm2) / norm2;
    worst = std::max(worst, rel);
    o.require(rel <= 1e-6, "identity at beta " + fmt(beta));
  }
  o.detail << reproduce_betas().size() << " betas; max relative defect " << fmt(worst) << "; ";
}

void criterion10(Outcome& o) {
  const double r = 2.0;
  const Mesh circle = generate_ellipse_mesh(r, r, 512, 64);
  double curv = 0.0;
  for (CurvatureMethod method : {CurvatureMethod::Osculating, CurvatureMethod::NormalExtension}) {
    const BoundaryGeometry g = boundary_geometry(circle, method);
    curv = std::max(curv, (g.curvature.array() * r - 1.0).abs().maxCoeff());
  }
  o.require(curv <= 0.01, "circle curvature within 1%");

  double area_err = 0.0;
  for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{kEllipseA, 1 / kEllipseA}, std::pair{2.0, 0.5}}) {
    const Mesh e = generate_ellipse_mesh(a, b, 256, 64);
    area_err = std::max(area_err, std::abs(area(e) - pi * a * b) / (pi * a * b));
  }
  o.require(area_err <= 0.005, "ellipse area within 0.5%");

  Eigen::Matrix3d k_exact;
  k_exact << 1, -0.5, -0.5, -0.5, 0.5, 0, -0.5, 0, 0.5;
  Eigen::Matrix3d m_exact = Eigen::Matrix3d::Constant(1.0 / 24);
  m_exact.diagonal().setConstant(2.0 / 24);
  Eigen::Matrix2Xd v(2, 3);
  v << 0, 1, 0, 0, 0, 1;
  Eigen::Matrix3Xi t(3, 1);
  t << 0, 1, 2;
  Eigen::Matrix2Xi e(2, 3);
  e << 0, 1, 2, 1, 2, 0;
  const Mesh ref(v, t, e);
  const double elem = std::max(
      (Eigen::MatrixXd(assemble_stiffness(ref)) - k_exact).cwiseAbs().maxCoeff(),
      (Eigen::MatrixXd(assemble_mass(ref)) - m_exact).cwiseAbs().maxCoeff());
  o.require(elem <= 1e-14, "reference element matrices exact");

  const Mesh big = base_ellipse(1024, 64);
  const VectorField w = interpolate_vector(
      [](const Point& x) { return Point(std::sin(x.y()) + 0.3 * x.x(), x.x() * x.y()); }, big);
  const BoundaryGeometry g = boundary_geometry(big);
  double flux = 0.0;
  for (Eigen::Index b = 0; b < big.num_boundary_nodes(); ++b)
    flux += g.weight[b] * w.col(big.boundary_nodes()[b]).dot(g.normal.col(b));
  const double fd = (area(deform_mesh(big, w, 1e-3)) - area(big)) / 1e-3;
  const double first = std::abs(fd - flux) / std::abs(flux);
  o.require(first <= 0.02, "first-order area change within 2%");

  o.detail << "curvature err " << fmt(curv) << ", area err " << fmt(area_err)
           << ", element err " << fmt(elem) << ", area-change err " << fmt(first) << "; ";
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.insert(std::stoi(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> allow_red, only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a.rfind("--allow-red=", 0) == 0) allow_red = parse_list(a.substr(12));
    else if (a.rfind("--only=", 0) == 0) only = parse_list(a.substr(7));
    else {
      std::cerr << "usage: acceptance [--allow-red=1,2] [--only=5,6]\n";
      return 2;
    }
  }

  const std::vector<std::pair<int, std::function<void(Outcome&)>>> criteria{
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  const double limits[] = {0, 10, 30, 60, 1e9, 300, 300, 180, 1800, 1e9, 1e9};

  int unexpected = 0;
  std::vector<int> red;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && !only.count(id) && !(id == 4 && only.count(4))) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "] ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= limits[id], "runtime limit " + fmt(limits[id]) + " s");
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail.str()
              << "(" << fmt(secs) << " s)" << std::endl;
    if (!o.pass) {
      red.push_back(id);
      if (!allow_red.count(id)) ++unexpected;
    }
  }
  if (!red.empty()) {
    std::cout << "red criteria:";
    for (int id : red) std::cout << " " << id << (allow_red.count(id) ? " (documented)" : "");
    std::cout << "\n";
  }
  return unexpected == 0 ? 0 : 1;
}
