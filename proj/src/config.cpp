#include "tresca/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tresca/errors.hpp"

namespace tresca {

namespace {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "beta",        "tau",        "mu",          "lambda_target",    "p0",          "penalty",
      "max_outer",   "stop_tol",   "check_every", "gradient_form",    "problem",
      "mesh_a",      "mesh_b",     "n_theta",     "n_rings",          "mesh_file",
      "vi_tol",      "vi_maxit",   "cg_tol",      "cg_maxit",         "eps_u",
      "eps_g",       "curvature_method",          "bbox",             "fd_t_list",
      "snapshot_every",           "out_dir"};
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(key + ": cannot parse '" + v + "' as a number");
  return x;
}

int parse_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size())
    throw ConfigError(key + ": cannot parse '" + v + "' as an integer");
  return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_double(key, tok));
  return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_string(EnergyKind kind) {
  switch (kind) {
    case EnergyKind::Tresca:
      return "tresca";
    case EnergyKind::Dirichlet:
      return "dirichlet";
    case EnergyKind::Neumann:
      return "neumann";
  }
  return "?";
}

std::string to_string(GradientForm form) {
  return form == GradientForm::Volume ? "volume" : "boundary";
}

std::string to_string(CurvatureMethod method) {
  return method == CurvatureMethod::Osculating ? "osculating" : "extension";
}

const std::vector<double>& reproduce_betas() {
  static const std::vector<double> betas{0.49, 0.46, 0.43, 0.37, 0.31, 0.28, 0.1, 0.01};
  return betas;
}

Preset preset_for_beta(double beta) {
  if (beta >= 0.49) return {0.1, 4.0, 1.0, 1000, {EnergyKind::Dirichlet}};
  if (beta <= 0.28) return {0.1, 4.0, 1.0, 1000, {EnergyKind::Neumann}};
  return {0.1, 4.0, 1.0, 1000, {EnergyKind::Dirichlet, EnergyKind::Neumann}};
}

RunConfig parse_config(std::string_view text,
                       const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> kv;
  const std::set<std::string> keys(known_keys().begin(), known_keys().end());
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!keys.count(key)) throw ConfigError(key + ": unknown key");
    if (kv.count(key)) throw ConfigError(key + ": given twice");
    kv[key] = value;
  }
  for (const auto& [k, v] : overrides) {
    if (!keys.count(k)) throw ConfigError(k + ": unknown key");
    kv[k] = v;
  }

  RunConfig c;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto v = get("beta")) c.optim.beta = parse_double("beta", *v);
  require(c.optim.beta > 0.0, "beta", "must be positive");
  const Preset preset = preset_for_beta(c.optim.beta);
  c.optim.tau = preset.tau;
  c.optim.mu = preset.mu;
  c.optim.max_outer = preset.max_outer;
  c.optim.penalty = preset.penalty;

  if (auto v = get("tau")) c.optim.tau = parse_double("tau", *v);
  if (auto v = get("mu")) c.optim.mu = parse_double("mu", *v);
  if (auto v = get("lambda_target")) c.optim.lambda_target = parse_double("lambda_target", *v);
  if (auto v = get("p0")) c.optim.p0 = parse_double("p0", *v);
  if (auto v = get("penalty")) c.optim.penalty = parse_double("penalty", *v);
  if (auto v = get("max_outer")) c.optim.max_outer = parse_int("max_outer", *v);
  if (auto v = get("stop_tol")) c.optim.stop_tol = parse_double("stop_tol", *v);
  if (auto v = get("check_every")) c.optim.check_every = parse_int("check_every", *v);
  if (auto v = get("gradient_form")) {
    if (*v == "volume")
      c.optim.gradient_form = GradientForm::Volume;
    else if (*v == "boundary")
      c.optim.gradient_form = GradientForm::Boundary;
    else
      throw ConfigError("gradient_form: expected volume or boundary");
  }
  if (auto v = get("problem")) {
    if (*v == "tresca")
      c.optim.problem = EnergyKind::Tresca;
    else if (*v == "dirichlet")
      c.optim.problem = EnergyKind::Dirichlet;
    else if (*v == "neumann")
      c.optim.problem = EnergyKind::Neumann;
    else
      throw ConfigError("problem: expected tresca, dirichlet or neumann");
  }
  if (auto v = get("mesh_a")) c.mesh_a = parse_double("mesh_a", *v);
  if (auto v = get("mesh_b")) c.mesh_b = parse_double("mesh_b", *v);
  if (auto v = get("n_theta")) c.n_theta = parse_int("n_theta", *v);
  if (auto v = get("n_rings")) c.n_rings = parse_int("n_rings", *v);
  if (auto v = get("mesh_file")) c.mesh_file = *v;
  if (auto v = get("vi_tol")) c.optim.vi.tol = parse_double("vi_tol", *v);
  if (auto v = get("vi_maxit")) c.optim.vi.max_iterations = parse_int("vi_maxit", *v);
  if (auto v = get("cg_tol")) c.optim.vi.cg_tol = parse_double("cg_tol", *v);
  if (auto v = get("cg_maxit")) c.optim.vi.cg_max_iterations = parse_int("cg_maxit", *v);
  if (auto v = get("eps_u")) c.eps_u = parse_double("eps_u", *v);
  if (auto v = get("eps_g")) c.eps_g = parse_double("eps_g", *v);
  if (auto v = get("curvature_method")) {
    if (*v == "osculating")
      c.optim.curvature = CurvatureMethod::Osculating;
    else if (*v == "extension")
      c.optim.curvature = CurvatureMethod::NormalExtension;
    else
      throw ConfigError("curvature_method: expected osculating or extension");
  }
  if (auto v = get("bbox")) {
    const std::vector<double> b = parse_list("bbox", *v);
    require(b.size() == 4, "bbox", "expected xmin xmax ymin ymax");
    c.optim.bbox = {b[0], b[1], b[2], b[3]};
  }
  if (auto v = get("fd_t_list")) c.fd_t_list = parse_list("fd_t_list", *v);
  if (auto v = get("snapshot_every")) c.snapshot_every = parse_int("snapshot_every", *v);
  if (auto v = get("out_dir")) c.out_dir = *v;

  require(c.optim.tau > 0.0, "tau", "must be positive");
  require(c.optim.mu > 0.0, "mu", "must be positive");
  require(c.optim.penalty >= 0.0, "penalty", "must be non-negative");
  require(c.optim.lambda_target > 0.0, "lambda_target", "must be positive");
  require(c.optim.max_outer >= 0, "max_outer", "must be non-negative");
  require(c.optim.stop_tol > 0.0, "stop_tol", "must be positive");
  require(c.optim.check_every >= 1, "check_every", "must be at least 1");
  require(c.mesh_a > 0.0, "mesh_a", "must be positive");
  require(c.mesh_b > 0.0, "mesh_b", "must be positive");
  require(c.n_theta >= 3, "n_theta", "must be at least 3");
  require(c.n_rings >= 1, "n_rings", "must be at least 1");
  require(c.optim.vi.tol > 0.0, "vi_tol", "must be positive");
  require(c.optim.vi.max_iterations >= 1, "vi_maxit", "must be at least 1");
  require(c.optim.vi.cg_tol > 0.0, "cg_tol", "must be positive");
  require(c.optim.vi.cg_max_iterations >= 1, "cg_maxit", "must be at least 1");
  require(c.eps_u > 0.0, "eps_u", "must be positive");
  require(c.eps_g > 0.0, "eps_g", "must be positive");
  require(c.optim.bbox.xmin < c.optim.bbox.xmax && c.optim.bbox.ymin < c.optim.bbox.ymax,
          "bbox", "must be non-empty");
  require(!c.fd_t_list.empty(), "fd_t_list", "must not be empty");
  for (std::size_t i = 0; i < c.fd_t_list.size(); ++i) {
    require(c.fd_t_list[i] > 0.0, "fd_t_list", "entries must be positive");
    if (i > 0)
      require(c.fd_t_list[i] < c.fd_t_list[i - 1], "fd_t_list",
              "entries must be strictly decreasing");
  }
  require(c.snapshot_every >= 0, "snapshot_every", "must be non-negative");
  require(!c.out_dir.empty(), "out_dir", "must not be empty");
  return c;
}

RunConfig load_config(const std::filesystem::path& path,
                      const std::map<std::string, std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string format_config(const RunConfig& c) {
  std::ostringstream out;
  auto line = [&](const std::string& k, const std::string& v) { out << k << " = " << v << "\n"; };
  line("beta", format_double(c.optim.beta));
  line("tau", format_double(c.optim.tau));
  line("mu", format_double(c.optim.mu));
  line("lambda_target", format_double(c.optim.lambda_target));
  line("p0", format_double(c.optim.p0));
  line("penalty", format_double(c.optim.penalty));
  line("max_outer", std::to_string(c.optim.max_outer));
  line("stop_tol", format_double(c.optim.stop_tol));
  line("check_every", std::to_string(c.optim.check_every));
  line("gradient_form", to_string(c.optim.gradient_form));
  line("problem", to_string(c.optim.problem));
  line("mesh_a", format_double(c.mesh_a));
  line("mesh_b", format_double(c.mesh_b));
  line("n_theta", std::to_string(c.n_theta));
  line("n_rings", std::to_string(c.n_rings));
  if (!c.mesh_file.empty()) line("mesh_file", c.mesh_file);
  line("vi_tol", format_double(c.optim.vi.tol));
  line("vi_maxit", std::to_string(c.optim.vi.max_iterations));
  line("cg_tol", format_double(c.optim.vi.cg_tol));
  line("cg_maxit", std::to_string(c.optim.vi.cg_max_iterations));
  line("eps_u", format_double(c.eps_u));
  line("eps_g", format_double(c.eps_g));
  line("curvature_method", to_string(c.optim.curvature));
  line("bbox", format_double(c.optim.bbox.xmin) + " " + format_double(c.optim.bbox.xmax) + " " +
                   format_double(c.optim.bbox.ymin) + " " + format_double(c.optim.bbox.ymax));
  std::string ts;
  for (std::size_t i = 0; i < c.fd_t_list.size(); ++i)
    ts += (i ? ", " : "") + format_double(c.fd_t_list[i]);
  line("fd_t_list", ts);
  line("snapshot_every", std::to_string(c.snapshot_every));
  line("out_dir", c.out_dir);
  return out.str();
}

}  // namespace tresca
