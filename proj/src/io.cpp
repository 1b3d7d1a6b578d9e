#include "tresca/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tresca/config.hpp"
#include "tresca/errors.hpp"

namespace tresca {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory for " + path.string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

double to_double(const std::string& s, const std::filesystem::path& path) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError(path.string() + ": bad number '" + s + "'");
  return x;
}

int to_int(const std::string& s, const std::filesystem::path& path) {
  int x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw IoError(path.string() + ": bad integer '" + s + "'");
  return x;
}

}  // namespace

std::string to_string(BoundaryLabel label) {
  switch (label) {
    case BoundaryLabel::N:
      return "N";
    case BoundaryLabel::D:
      return "D";
    case BoundaryLabel::SMinus:
      return "S-";
    case BoundaryLabel::SPlus:
      return "S+";
  }
  return "?";
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

void write_history_csv(const std::vector<HistoryRow>& history,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "iter,J,area,p,tau,stick,slip_plus,slip_minus,min_angle,aug_before,aug_after\n";
  for (const HistoryRow& r : history)
    out << r.iter << ',' << format_double(r.energy) << ',' << format_double(r.area) << ','
        << format_double(r.p) << ',' << format_double(r.tau) << ',' << r.stick << ','
        << r.slip_plus << ',' << r.slip_minus << ',' << format_double(r.min_angle) << ','
        << format_double(r.aug_before) << ',' << format_double(r.aug_after) << '\n';
  finish(out, path);
}

std::vector<HistoryRow> read_history_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows[0].size() != 11 || rows[0][0] != "iter")
    throw IoError(path.string() + ": not a history file");
  std::vector<HistoryRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& c = rows[i];
    if (c.size() != 11) throw IoError(path.string() + ": row " + std::to_string(i) + " is short");
    HistoryRow r;
    r.iter = to_int(c[0], path);
    r.energy = to_double(c[1], path);
    r.area = to_double(c[2], path);
    r.p = to_double(c[3], path);
    r.tau = to_double(c[4], path);
    r.stick = to_int(c[5], path);
    r.slip_plus = to_int(c[6], path);
    r.slip_minus = to_int(c[7], path);
    r.min_angle = to_double(c[8], path);
    r.aug_before = to_double(c[9], path);
    r.aug_after = to_double(c[10], path);
    out.push_back(r);
  }
  return out;
}

void write_boundary_csv(const Mesh& mesh, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "x,y\n";
  for (int v : mesh.boundary_nodes())
    out << format_double(mesh.vertex(v).x()) << ',' << format_double(mesh.vertex(v).y()) << '\n';
  finish(out, path);
}

Eigen::Matrix2Xd read_boundary_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows[0].size() != 2 || rows[0][0] != "x")
    throw IoError(path.string() + ": not a boundary file");
  Eigen::Matrix2Xd pts(2, rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 2) throw IoError(path.string() + ": bad row " + std::to_string(i));
    pts(0, i - 1) = to_double(rows[i][0], path);
    pts(1, i - 1) = to_double(rows[i][1], path);
  }
  return pts;
}

void write_vtk(const Mesh& mesh, const VtkFields& fields, const std::filesystem::path& path) {
  for (const auto& [name, f] : fields.scalars) require_on_mesh(mesh, f, name);
  for (const auto& [name, f] : fields.vectors) require_on_mesh(mesh, f, name);
  for (const auto& [name, f] : fields.integers)
    if (f.size() != mesh.num_vertices()) throw MeshMismatchError(name + " has the wrong length");
  auto out = open_out(path);
  const Eigen::Index nv = mesh.num_vertices(), nt = mesh.num_triangles();
  out << "# vtk DataFile Version 3.0\ntresca-shape\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (Eigen::Index i = 0; i < nv; ++i)
    out << format_double(mesh.vertex(i).x()) << ' ' << format_double(mesh.vertex(i).y())
        << " 0\n";
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (Eigen::Index t = 0; t < nt; ++t)
    out << "3 " << mesh.triangles()(0, t) << ' ' << mesh.triangles()(1, t) << ' '
        << mesh.triangles()(2, t) << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (Eigen::Index t = 0; t < nt; ++t) out << "5\n";
  if (!fields.scalars.empty() || !fields.integers.empty() || !fields.vectors.empty()) {
    out << "POINT_DATA " << nv << '\n';
    for (const auto& [name, f] : fields.scalars) {
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (Eigen::Index i = 0; i < nv; ++i) out << format_double(f[i]) << '\n';
    }
    for (const auto& [name, f] : fields.integers) {
      out << "SCALARS " << name << " int 1\nLOOKUP_TABLE default\n";
      for (Eigen::Index i = 0; i < nv; ++i) out << f[i] << '\n';
    }
    for (const auto& [name, f] : fields.vectors) {
      out << "VECTORS " << name << " double\n";
      for (Eigen::Index i = 0; i < nv; ++i)
        out << format_double(f(0, i)) << ' ' << format_double(f(1, i)) << " 0\n";
    }
  }
  finish(out, path);
}

VtkSummary read_vtk_summary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  VtkSummary s;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "DATASET") header = true;
    if (word == "POINTS") ls >> s.points;
    if (word == "CELLS") ls >> s.cells;
    if (word == "SCALARS" || word == "VECTORS") {
      std::string name;
      ls >> name;
      s.arrays.push_back(name);
    }
  }
  if (!header || s.points <= 0 || s.cells <= 0)
    throw IoError(path.string() + ": not a VTK unstructured grid");
  return s;
}

void write_fd_csv(const std::vector<FdRow>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,fd,formula,gap,ok\n";
  for (const FdRow& r : rows)
    out << format_double(r.t) << ',' << format_double(r.quotient) << ','
        << format_double(r.formula) << ',' << format_double(r.gap) << ',' << (r.ok ? 1 : 0)
        << '\n';
  finish(out, path);
}

void write_material_csv(const std::vector<MaterialFdRow>& rows,
                        const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,h1_gap,ok\n";
  for (const MaterialFdRow& r : rows)
    out << format_double(r.t) << ',' << format_double(r.gap) << ',' << (r.ok ? 1 : 0) << '\n';
  finish(out, path);
}

void write_classification_csv(const Mesh& mesh, const ScalarField& u,
                              const Eigen::VectorXd& flux, const Eigen::VectorXd& g,
                              const BoundaryClassification& cls,
                              const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "node,x,y,u,flux,g,label\n";
  for (Eigen::Index b = 0; b < mesh.num_boundary_nodes(); ++b) {
    const int v = mesh.boundary_nodes()[b];
    out << v << ',' << format_double(mesh.vertex(v).x()) << ','
        << format_double(mesh.vertex(v).y()) << ',' << format_double(u[v]) << ','
        << format_double(flux[b]) << ',' << format_double(g[b]) << ','
        << to_string(cls.label[b]) << '\n';
  }
  finish(out, path);
}

}  // namespace tresca
