#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "tresca/config.hpp"
#include "tresca/errors.hpp"
#include "tresca/io.hpp"
#include "tresca/mesh.hpp"
#include "tresca/optimize.hpp"
#include "tresca/problem_data.hpp"
#include "tresca/shape_calculus.hpp"

namespace tresca {

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string mesh;
  double beta = 0.0;
  bool has_beta = false;
};

RunConfig resolve(const Flags& f) {
  std::map<std::string, std::string> over;
  if (f.has_beta) over["beta"] = format_double(f.beta);
  if (!f.out.empty()) over["out_dir"] = f.out;
  if (!f.mesh.empty()) over["mesh_file"] = f.mesh;
  return f.config.empty() ? parse_config("", over) : load_config(f.config, over);
}

Mesh initial_mesh(const RunConfig& c) {
  if (!c.mesh_file.empty()) return load_mesh(c.mesh_file);
  return generate_ellipse_mesh(c.mesh_a, c.mesh_b, c.n_theta, c.n_rings);
}

// Every emitted file is read back before the command reports success.
class Validator {
 public:
  void history(const fs::path& p, std::size_t rows) {
    check(read_history_csv(p).size() == rows, p, "row count");
  }
  void boundary(const fs::path& p, const Mesh& m) {
    check(read_boundary_csv(p).cols() == m.num_boundary_nodes(), p, "node count");
  }
  void vtk(const fs::path& p, const Mesh& m) {
    const VtkSummary s = read_vtk_summary(p);
    check(s.points == m.num_vertices() && s.cells == m.num_triangles(), p, "sizes");
  }
  void mesh(const fs::path& p, const Mesh& m) {
    const Mesh back = load_mesh(p);
    check(back.vertices() == m.vertices() && back.triangles() == m.triangles(), p, "contents");
  }
  void echo(const fs::path& p, const RunConfig& c) {
    check(format_config(load_config(p)) == format_config(c), p, "resolved configuration");
  }
  void csv(const fs::path& p, std::size_t rows) {
    check(read_csv(p).size() == rows + 1, p, "row count");
  }
  void report(std::ostream& out) const {
    out << "self-check: " << files_ << " files parsed back\n";
    if (!failures_.empty()) throw IoError("self-check failed: " + failures_);
  }

 private:
  void check(bool ok, const fs::path& p, const std::string& what) {
    ++files_;
    if (!ok) failures_ += p.string() + " (" + what + ") ";
  }
  int files_ = 0;
  std::string failures_;
};

void write_echo(const RunConfig& c, Validator& val) {
  fs::create_directories(c.out_dir);
  const fs::path p = fs::path(c.out_dir) / "config.echo";
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  out << format_config(c);
  out.close();
  val.echo(p, c);
}

Eigen::VectorXd boundary_g(const Mesh& mesh, const ProblemData& data) {
  return boundary_values(mesh, interpolate(data.g.value, mesh));
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
  Validator val;
  write_echo(c, val);
  const Mesh mesh = initial_mesh(c);
  const ProblemData data = builtin_problem_data(c.optim.beta);
  const EnergyKind kind = c.optim.problem;
  const State s = solve_state(mesh, data, kind, c.optim.vi);
  const GradientData grad = gradient_data(mesh, s, data, kind, GradientForm::Boundary,
                                          c.optim.curvature, c.optim.vi);
  const VectorField v = descent_direction(mesh, grad, c.optim.p0, c.optim.vi);

  Eigen::VectorXi status = Eigen::VectorXi::Constant(mesh.num_vertices(), -1);
  Eigen::VectorXd density = Eigen::VectorXd::Zero(mesh.num_vertices());
  const auto st = kind == EnergyKind::Tresca ? s.report.status
                                             : statuses_of(s.problem, s.u, c.optim.vi);
  for (Eigen::Index b = 0; b < mesh.num_boundary_nodes(); ++b) {
    status[mesh.boundary_nodes()[b]] = static_cast<int>(st[b]);
    density[mesh.boundary_nodes()[b]] = grad.density[b];
  }
  const fs::path dir = c.out_dir;
  write_vtk(mesh, {{{"u", s.u}, {"density", density}}, {{"status", status}}, {{"V", v}}},
            dir / "solve.vtk");
  val.vtk(dir / "solve.vtk", mesh);
  write_boundary_csv(mesh, dir / "boundary.csv");
  val.boundary(dir / "boundary.csv", mesh);

  out << "problem " << to_string(kind) << ", " << mesh.num_vertices() << " vertices\n";
  out << "energy " << format_double(s.energy) << "  compliance "
      << format_double(compliance_energy(s.problem, s.u)) << "\n";
  if (kind == EnergyKind::Tresca)
    out << "switching iterations " << s.report.outer_iterations
        << (s.report.by_fallback ? " (proximal fallback)" : "") << ", law residual "
        << format_double(tresca_law_residual(s.problem, s.u)) << "\n";
  val.report(out);
  return 0;
}

int cmd_optimize(const RunConfig& c, std::ostream& out) {
  Validator val;
  write_echo(c, val);
  const fs::path dir = c.out_dir;
  const Mesh mesh0 = initial_mesh(c);
  save_mesh(mesh0, dir / "initial.mesh");
  val.mesh(dir / "initial.mesh", mesh0);
  std::vector<std::pair<fs::path, Mesh>> snapshots;
  IterationHook hook;
  if (c.snapshot_every > 0) {
    hook = [&](int iter, const Mesh& m, const State& s) {
      if ((iter - 1) % c.snapshot_every != 0) return;
      const fs::path p = dir / ("snapshot_" + std::to_string(iter - 1) + ".vtk");
      write_vtk(m, {{{"u", s.u}}, {}, {}}, p);
      snapshots.emplace_back(p, m);
    };
  }
  const OptimResult res = optimize(mesh0, c.optim, hook);
  for (const auto& [p, m] : snapshots) val.vtk(p, m);
  write_history_csv(res.history, dir / "history.csv");
  val.history(dir / "history.csv", res.history.size());
  write_boundary_csv(res.mesh, dir / "final_boundary.csv");
  val.boundary(dir / "final_boundary.csv", res.mesh);
  save_mesh(res.mesh, dir / "final.mesh");
  val.mesh(dir / "final.mesh", res.mesh);

  out << res.history.size() << " iterations: " << res.message << "\n";
  if (!res.history.empty()) {
    const HistoryRow& last = res.history.back();
    out << "final J " << format_double(last.energy) << ", area " << format_double(last.area)
        << ", p " << format_double(last.p) << "\n";
  }
  val.report(out);
  return res.failed ? 3 : 0;
}

int cmd_check_gradient(const RunConfig& c, std::ostream& out) {
  Validator val;
  write_echo(c, val);
  const Mesh mesh = initial_mesh(c);
  const ProblemData data = builtin_problem_data(c.optim.beta);
  for (const std::string& name : velocity_names()) {
    const VectorField v = named_velocity(name, mesh);
    const auto rows = fd_shape_gradient(mesh, data, c.optim.problem, v, c.fd_t_list, c.optim.vi);
    const fs::path p = fs::path(c.out_dir) / ("fd_gradient_" + name + ".csv");
    write_fd_csv(rows, p);
    val.csv(p, rows.size());
    out << name << ": formula " << format_double(rows.front().formula);
    for (const FdRow& r : rows)
      out << "  t=" << format_double(r.t) << " gap=" << (r.ok ? format_double(r.gap) : "inverted");
    out << "\n";
  }
  val.report(out);
  return 0;
}

int cmd_check_material(const RunConfig& c, std::ostream& out) {
  Validator val;
  write_echo(c, val);
  const Mesh mesh = initial_mesh(c);
  const ProblemData data = builtin_problem_data(c.optim.beta);
  for (const std::string& name : velocity_names()) {
    const VectorField v = named_velocity(name, mesh);
    const auto rows = fd_material_derivative(mesh, data, v, c.fd_t_list, c.optim.vi);
    const fs::path p = fs::path(c.out_dir) / ("fd_material_" + name + ".csv");
    write_material_csv(rows, p);
    val.csv(p, rows.size());
    out << name << ":";
    for (const MaterialFdRow& r : rows)
      out << "  t=" << format_double(r.t) << " gap=" << (r.ok ? format_double(r.gap) : "inverted");
    out << "\n";
  }
  val.report(out);
  return 0;
}

int cmd_classify(const RunConfig& c, std::ostream& out) {
  Validator val;
  write_echo(c, val);
  const Mesh mesh = initial_mesh(c);
  const ProblemData data = builtin_problem_data(c.optim.beta);
  const State s = solve_state(mesh, data, EnergyKind::Tresca, c.optim.vi);
  const Eigen::VectorXd g = boundary_g(mesh, data);
  const BoundaryClassification cls =
      classify_boundary(mesh, s.u, s.flux, g, c.eps_u * s.u.lpNorm<Eigen::Infinity>(),
                        c.eps_g * g.lpNorm<Eigen::Infinity>());
  const fs::path p = fs::path(c.out_dir) / "classification.csv";
  write_classification_csv(mesh, s.u, s.flux, g, cls, p);
  val.csv(p, mesh.num_boundary_nodes());
  out << "N " << cls.count(BoundaryLabel::N) << "  D " << cls.count(BoundaryLabel::D)
      << "  S- " << cls.count(BoundaryLabel::SMinus) << "  S+ "
      << cls.count(BoundaryLabel::SPlus) << "\n";
  val.report(out);
  return 0;
}

int cmd_reproduce(RunConfig c, std::ostream& out) {
  const auto& known = reproduce_betas();
  if (std::none_of(known.begin(), known.end(),
                   [&](double b) { return std::abs(b - c.optim.beta) <= 1e-12; })) {
    std::string list;
    for (double b : known) list += (list.empty() ? "" : ", ") + format_double(b);
    throw ConfigError("beta: reproduce has presets only for " + list);
  }
  Validator val;
  const Preset preset = preset_for_beta(c.optim.beta);
  c.optim.problem = EnergyKind::Tresca;
  write_echo(c, val);
  const fs::path dir = c.out_dir;
  const Mesh mesh0 = initial_mesh(c);

  auto run = [&](EnergyKind kind) {
    OptimConfig oc = c.optim;
    oc.problem = kind;
    const auto start = std::chrono::steady_clock::now();
    OptimResult r = optimize(mesh0, oc);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string tag = to_string(kind);
    write_history_csv(r.history, dir / (tag + "_history.csv"));
    val.history(dir / (tag + "_history.csv"), r.history.size());
    write_boundary_csv(r.mesh, dir / (tag + "_boundary.csv"));
    val.boundary(dir / (tag + "_boundary.csv"), r.mesh);
    out << tag << ": " << r.history.size() << " iterations in " << format_double(secs)
        << " s, " << r.message << "\n";
    return r;
  };

  const OptimResult tresca = run(EnergyKind::Tresca);
  std::ostringstream report;
  report << "beta = " << format_double(c.optim.beta) << "\n";
  report << "tresca_area = " << format_double(area(tresca.mesh)) << "\n";
  report << "tresca_failed = " << (tresca.failed ? 1 : 0) << "\n";
  const double diam = boundary_diameter(tresca.mesh);
  report << "tresca_diameter = " << format_double(diam) << "\n";
  for (EnergyKind kind : preset.comparison) {
    const OptimResult other = run(kind);
    const BoundaryDistance d = compare_boundaries(tresca.mesh, other.mesh);
    const std::string tag = to_string(kind);
    report << tag << "_area = " << format_double(area(other.mesh)) << "\n";
    report << tag << "_failed = " << (other.failed ? 1 : 0) << "\n";
    report << "hausdorff_tresca_" << tag << " = " << format_double(d.hausdorff) << "\n";
    report << "mean_distance_tresca_" << tag << " = " << format_double(d.mean) << "\n";
    report << "relative_hausdorff_tresca_" << tag << " = " << format_double(d.hausdorff / diam)
           << "\n";
  }
  {
    std::ofstream f(dir / "report.txt");
    f << report.str();
  }
  {
    std::ifstream f(dir / "report.txt");
    std::stringstream back;
    back << f.rdbuf();
    if (back.str() != report.str()) throw IoError("report.txt did not read back");
  }
  out << report.str();
  val.report(out);
  return tresca.failed ? 3 : 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shape optimization for the scalar Tresca friction problem", "tresca-shape"};
  Flags flags;
  app.require_subcommand(1);
  std::map<std::string, std::function<int(const RunConfig&)>> commands{
      {"solve", [&](const RunConfig& c) { return cmd_solve(c, out); }},
      {"optimize", [&](const RunConfig& c) { return cmd_optimize(c, out); }},
      {"check-gradient", [&](const RunConfig& c) { return cmd_check_gradient(c, out); }},
      {"check-material", [&](const RunConfig& c) { return cmd_check_material(c, out); }},
      {"classify", [&](const RunConfig& c) { return cmd_classify(c, out); }},
      {"reproduce", [&](const RunConfig& c) { return cmd_reproduce(c, out); }},
  };
  const std::map<std::string, std::string> help{
      {"solve", "one state solve with VTK and boundary output"},
      {"optimize", "volume-constrained shape optimization loop"},
      {"check-gradient", "finite-difference check of the shape gradient"},
      {"check-material", "finite-difference check of the material derivative"},
      {"classify", "boundary classification of the Tresca solution"},
      {"reproduce", "optimize at --beta and compare with the classical problem"},
  };
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", flags.config, "configuration file (key = value)");
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--mesh", flags.mesh, "mesh file instead of the generated ellipse");
    auto* b = sub->add_option("--beta", flags.beta, "friction scale");
    if (name == "reproduce") b->required();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << app.help();
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 2 : rc;
  }
  try {
    for (const auto& [name, fn] : commands) {
      CLI::App* sub = app.get_subcommand(name);
      if (!sub->parsed()) continue;
      flags.has_beta = sub->get_option("--beta")->count() > 0;
      return fn(resolve(flags));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << app.help();
  return 2;
}

}  // namespace tresca
