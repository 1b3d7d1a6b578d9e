#include "tresca/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "tresca/element.hpp"
#include "tresca/errors.hpp"
#include "tresca/fem.hpp"

namespace tresca {

namespace {

std::string entity(std::string_view kind, Eigen::Index i) {
  return std::string(kind) + " " + std::to_string(i);
}

}  // namespace

Mesh::Mesh(Eigen::Matrix2Xd vertices, Eigen::Matrix3Xi triangles,
           Eigen::Matrix2Xi boundary_edges)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
  const Eigen::Index nv = vertices_.cols();
  const Eigen::Index nt = triangles_.cols();
  const Eigen::Index nb = boundary_edges.cols();
  if (nv < 3 || nt < 1) throw ValidationError("mesh needs at least one triangle");
  if (!vertices_.allFinite()) throw ValidationError("non-finite vertex coordinate");

  std::vector<char> used(nv, 0);
  std::map<std::pair<int, int>, int> directed;  // edge -> owning triangle
  for (Eigen::Index t = 0; t < nt; ++t) {
    for (int k = 0; k < 3; ++k) {
      const int v = triangles_(k, t);
      if (v < 0 || v >= nv)
        throw ValidationError(entity("triangle", t) + " references vertex " +
                              std::to_string(v) + " out of range");
      used[v] = 1;
    }
    if (triangles_(0, t) == triangles_(1, t) || triangles_(1, t) == triangles_(2, t) ||
        triangles_(0, t) == triangles_(2, t))
      throw ValidationError(entity("triangle", t) + " repeats a vertex");
    if (!(triangle_area(t) > 0.0))
      throw ValidationError(entity("triangle", t) + " is not counterclockwise");
    for (int k = 0; k < 3; ++k) {
      const std::pair<int, int> e{triangles_(k, t), triangles_((k + 1) % 3, t)};
      if (!directed.emplace(e, static_cast<int>(t)).second)
        throw ValidationError("edge " + std::to_string(e.first) + "-" +
                              std::to_string(e.second) + " is shared with equal orientation (" +
                              entity("triangle", t) + ")");
    }
  }
  for (Eigen::Index v = 0; v < nv; ++v)
    if (!used[v]) throw ValidationError(entity("vertex", v) + " belongs to no triangle");

  // Edges seen once are boundary edges, oriented as in their triangle.
  std::map<int, std::pair<int, int>> next;  // from -> (to, owning triangle)
  Eigen::Index free_edges = 0;
  for (const auto& [e, t] : directed) {
    if (directed.count({e.second, e.first})) continue;
    ++free_edges;
    if (!next.emplace(e.first, std::pair{e.second, t}).second)
      throw ValidationError("boundary is not a simple loop at " + entity("vertex", e.first));
  }
  if (nb != free_edges)
    throw ValidationError("mesh has " + std::to_string(free_edges) +
                          " boundary edges but the file lists " + std::to_string(nb));
  for (Eigen::Index b = 0; b < nb; ++b) {
    const int i = boundary_edges(0, b), j = boundary_edges(1, b);
    auto it = next.find(i);
    if (it == next.end() || it->second.first != j)
      throw ValidationError(entity("boundary edge", b) + " (" + std::to_string(i) + "-" +
                            std::to_string(j) +
                            ") is not a positively oriented edge of exactly one triangle");
  }

  // Follow the chain from the first listed edge; it must cover every edge.
  boundary_index_.assign(nv, -1);
  boundary_edges_.resize(2, nb);
  int v = boundary_edges(0, 0);
  for (Eigen::Index b = 0; b < nb; ++b) {
    if (boundary_index_[v] >= 0)
      throw ValidationError("boundary edges form more than one loop");
    const auto [to, t] = next.at(v);
    boundary_index_[v] = static_cast<int>(b);
    boundary_nodes_.push_back(v);
    edge_triangle_.push_back(t);
    boundary_edges_(0, b) = v;
    boundary_edges_(1, b) = to;
    v = to;
  }
  if (v != boundary_edges(0, 0))
    throw ValidationError("boundary edges form more than one loop");
}

double Mesh::triangle_area(Eigen::Index t) const {
  return signed_area<double>(vertices_.col(triangles_(0, t)), vertices_.col(triangles_(1, t)),
                             vertices_.col(triangles_(2, t)));
}

Mesh generate_ellipse_mesh(double a, double b, int n_theta, int n_rings) {
  if (!(a > 0.0) || !(b > 0.0)) throw ParameterError("ellipse semi-axes must be positive");
  if (n_theta < 3 || n_rings < 1)
    throw ParameterError("ellipse mesh needs n_theta >= 3 and n_rings >= 1");

  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<Point> pts{Point::Zero()};
  // Unwrapped angle and vertex index of every node, ring by ring.
  std::vector<std::vector<std::pair<double, int>>> rings;
  for (int k = 1; k <= n_rings; ++k) {
    const int n = std::max(3, static_cast<int>(std::lround(double(n_theta) * k / n_rings)));
    const int count = k == n_rings ? n_theta : n;
    const double r = double(k) / n_rings;
    // Stagger inner rings by half a step so neighbouring rings do not align.
    const double offset = k == n_rings ? 0.0 : ((n_rings - k) % 2) * 0.5 * two_pi / count;
    std::vector<std::pair<double, int>> ring;
    for (int j = 0; j < count; ++j) {
      const double th = offset + two_pi * j / count;
      ring.emplace_back(th, static_cast<int>(pts.size()));
      if (k == n_rings)
        pts.emplace_back(a * std::cos(th), b * std::sin(th));
      else
        pts.emplace_back(a * r * std::cos(th), b * r * std::sin(th));
    }
    rings.push_back(std::move(ring));
  }

  std::vector<Eigen::Vector3i> tris;
  auto add = [&](int i, int j, int k) {
    if (signed_area<double>(pts[i], pts[j], pts[k]) < 0.0) std::swap(j, k);
    tris.emplace_back(i, j, k);
  };
  const auto& first = rings.front();
  for (std::size_t j = 0; j < first.size(); ++j)
    add(0, first[j].second, first[(j + 1) % first.size()].second);
  for (std::size_t k = 1; k < rings.size(); ++k) {
    const auto& in = rings[k - 1];
    const auto& out = rings[k];
    const std::size_t ni = in.size(), no = out.size();
    auto angle = [&](const auto& ring, std::size_t i) {
      return ring[i % ring.size()].first + two_pi * double(i / ring.size());
    };
    std::size_t i = 0, j = 0;
    while (i < ni || j < no) {
      const bool advance_inner =
          j == no || (i < ni && angle(in, i + 1) < angle(out, j + 1));
      if (advance_inner) {
        add(in[i % ni].second, out[j % no].second, in[(i + 1) % ni].second);
        ++i;
      } else {
        add(in[i % ni].second, out[j % no].second, out[(j + 1) % no].second);
        ++j;
      }
    }
  }

  Eigen::Matrix2Xd v(2, pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) v.col(i) = pts[i];
  Eigen::Matrix3Xi t(3, tris.size());
  for (std::size_t i = 0; i < tris.size(); ++i) t.col(i) = tris[i];
  const auto& outer = rings.back();
  Eigen::Matrix2Xi e(2, outer.size());
  for (std::size_t j = 0; j < outer.size(); ++j)
    e.col(j) << outer[j].second, outer[(j + 1) % outer.size()].second;
  return Mesh(std::move(v), std::move(t), std::move(e));
}

namespace {

class Tokens {
 public:
  explicit Tokens(std::string_view text) {
    std::size_t line = 1, pos = 0;
    while (pos < text.size()) {
      const char c = text[pos];
      if (c == '\n') {
        ++line;
        ++pos;
      } else if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        std::size_t end = pos;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])) &&
               text[end] != '#')
          ++end;
        items_.push_back({text.substr(pos, end - pos), line});
        pos = end;
      }
    }
  }

  template <typename T>
  T next(std::string_view what) {
    if (cursor_ >= items_.size())
      throw ValidationError("mesh file ends early while reading " + std::string(what));
    const auto [tok, line] = items_[cursor_++];
    T value{};
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      throw ValidationError("line " + std::to_string(line) + ": cannot parse '" +
                            std::string(tok) + "' as " + std::string(what));
    return value;
  }

  bool done() const { return cursor_ == items_.size(); }

 private:
  std::vector<std::pair<std::string_view, std::size_t>> items_;
  std::size_t cursor_ = 0;
};

void append_number(std::string& out, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

}  // namespace

Mesh parse_mesh(std::string_view text) {
  Tokens tok(text);
  const long nv = tok.next<long>("vertex count");
  const long nt = tok.next<long>("triangle count");
  const long nb = tok.next<long>("boundary edge count");
  if (nv < 0 || nt < 0 || nb < 0) throw ValidationError("negative count in mesh header");
  Eigen::Matrix2Xd v(2, nv);
  for (long i = 0; i < nv; ++i) {
    v(0, i) = tok.next<double>("vertex " + std::to_string(i));
    v(1, i) = tok.next<double>("vertex " + std::to_string(i));
  }
  Eigen::Matrix3Xi t(3, nt);
  for (long i = 0; i < nt; ++i)
    for (int k = 0; k < 3; ++k) t(k, i) = tok.next<int>("triangle " + std::to_string(i));
  Eigen::Matrix2Xi e(2, nb);
  for (long i = 0; i < nb; ++i)
    for (int k = 0; k < 2; ++k) e(k, i) = tok.next<int>("boundary edge " + std::to_string(i));
  if (!tok.done()) throw ValidationError("trailing data after the last boundary edge");
  if (nb == 0) throw ValidationError("mesh file lists no boundary edges");
  return Mesh(std::move(v), std::move(t), std::move(e));
}

std::string format_mesh(const Mesh& mesh) {
  std::string out;
  out += std::to_string(mesh.num_vertices()) + " " + std::to_string(mesh.num_triangles()) +
         " " + std::to_string(mesh.boundary_edges().cols()) + "\n";
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
    append_number(out, mesh.vertices()(0, i));
    out += ' ';
    append_number(out, mesh.vertices()(1, i));
    out += '\n';
  }
  for (Eigen::Index i = 0; i < mesh.num_triangles(); ++i)
    out += std::to_string(mesh.triangles()(0, i)) + " " +
           std::to_string(mesh.triangles()(1, i)) + " " +
           std::to_string(mesh.triangles()(2, i)) + "\n";
  for (Eigen::Index i = 0; i < mesh.boundary_edges().cols(); ++i)
    out += std::to_string(mesh.boundary_edges()(0, i)) + " " +
           std::to_string(mesh.boundary_edges()(1, i)) + "\n";
  return out;
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_mesh(ss.str());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write mesh file " + path.string());
  out << format_mesh(mesh);
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

Eigen::VectorXd harmonic_curvature(const Mesh& mesh, const Eigen::Matrix2Xd& normal) {
  const Eigen::Index nv = mesh.num_vertices();
  std::vector<char> fixed(nv, 0);
  Eigen::Matrix2Xd ext(2, nv);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd values = Eigen::VectorXd::Zero(nv);
    for (Eigen::Index b = 0; b < mesh.num_boundary_nodes(); ++b) {
      fixed[mesh.boundary_nodes()[b]] = 1;
      values[mesh.boundary_nodes()[b]] = normal(c, b);
    }
    SparseMatrix k = assemble_stiffness(mesh);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv);
    apply_dirichlet(k, rhs, fixed, values);
    ext.row(c) = solve_spd(k, rhs).transpose();
  }
  const VectorField g0 = node_gradient(mesh, ext.row(0).transpose());
  const VectorField g1 = node_gradient(mesh, ext.row(1).transpose());
  Eigen::VectorXd h(mesh.num_boundary_nodes());
  for (Eigen::Index b = 0; b < h.size(); ++b) {
    const int v = mesh.boundary_nodes()[b];
    Eigen::Matrix2d jac;
    jac.row(0) = g0.col(v).transpose();
    jac.row(1) = g1.col(v).transpose();
    const Point n = normal.col(b);
    h[b] = jac.trace() - n.dot(jac * n);
  }
  return h;
}

}  // namespace

BoundaryGeometry boundary_geometry(const Mesh& mesh, CurvatureMethod method) {
  const Eigen::Index nb = mesh.num_boundary_nodes();
  BoundaryGeometry geo;
  geo.edge_normal.resize(2, nb);
  geo.edge_length.resize(nb);
  for (Eigen::Index e = 0; e < nb; ++e) {
    const Point t = mesh.vertex(mesh.boundary_edges()(1, e)) -
                    mesh.vertex(mesh.boundary_edges()(0, e));
    const double len = t.norm();
    if (!(len > 0.0)) throw GeometryError(entity("boundary edge", e) + " has zero length");
    geo.edge_length[e] = len;
    geo.edge_normal.col(e) = Point(t.y(), -t.x()) / len;
  }
  geo.normal.resize(2, nb);
  geo.weight.resize(nb);
  geo.curvature.resize(nb);
  for (Eigen::Index b = 0; b < nb; ++b) {
    const Eigen::Index prev = (b + nb - 1) % nb;
    // Length-weighted edge normals are just the rotated edge vectors.
    const Point sum = geo.edge_length[prev] * geo.edge_normal.col(prev) +
                      geo.edge_length[b] * geo.edge_normal.col(b);
    if (!(sum.norm() > 0.0))
      throw GeometryError(entity("boundary node", b) + " has a folded-back boundary");
    geo.normal.col(b) = sum.normalized();
    geo.weight[b] = 0.5 * (geo.edge_length[prev] + geo.edge_length[b]);
  }
  if (method == CurvatureMethod::Osculating) {
    const auto& nodes = mesh.boundary_nodes();
    for (Eigen::Index b = 0; b < nb; ++b) {
      const Point p = mesh.vertex(nodes[(b + nb - 1) % nb]);
      const Point c = mesh.vertex(nodes[b]);
      const Point n = mesh.vertex(nodes[(b + 1) % nb]);
      geo.curvature[b] = 2.0 * cross2<double>(c - p, n - c) /
                         ((c - p).norm() * (n - c).norm() * (n - p).norm());
    }
  } else {
    geo.curvature = harmonic_curvature(mesh, geo.normal);
  }
  return geo;
}

Eigen::VectorXd boundary_weights(const Mesh& mesh) {
  const Eigen::Index nb = mesh.num_boundary_nodes();
  Eigen::VectorXd len(nb);
  for (Eigen::Index e = 0; e < nb; ++e)
    len[e] = (mesh.vertex(mesh.boundary_edges()(1, e)) -
              mesh.vertex(mesh.boundary_edges()(0, e)))
                 .norm();
  Eigen::VectorXd w(nb);
  for (Eigen::Index b = 0; b < nb; ++b) w[b] = 0.5 * (len[(b + nb - 1) % nb] + len[b]);
  return w;
}

Mesh deform_mesh(const Mesh& mesh, const VectorField& velocity, double tau) {
  require_on_mesh(mesh, velocity, "velocity");
  if (!(tau >= 0.0)) throw ParameterError("deformation step must be non-negative");
  Eigen::Matrix2Xd moved = mesh.vertices() + tau * velocity;
  double min_area = std::numeric_limits<double>::infinity();
  Eigen::Index worst = 0;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    const double s = signed_area<double>(moved.col(mesh.triangles()(0, t)),
                                         moved.col(mesh.triangles()(1, t)),
                                         moved.col(mesh.triangles()(2, t)));
    if (s < min_area) {
      min_area = s;
      worst = t;
    }
  }
  if (!(min_area > 0.0))
    throw InversionError(entity("triangle", worst) + " inverted by the deformation", min_area);
  return Mesh(std::move(moved), mesh.triangles(), mesh.boundary_edges());
}

double area(const Mesh& mesh) {
  double s = 0.0;
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) s += mesh.triangle_area(t);
  return s;
}

double perimeter(const Mesh& mesh) { return boundary_weights(mesh).sum(); }

MeshQuality quality(const Mesh& mesh) {
  MeshQuality q{std::numbers::pi, std::numeric_limits<double>::infinity()};
  for (Eigen::Index t = 0; t < mesh.num_triangles(); ++t) {
    q.min_area = std::min(q.min_area, mesh.triangle_area(t));
    for (int k = 0; k < 3; ++k) {
      const Point o = mesh.vertex(mesh.triangles()(k, t));
      const Point u = mesh.vertex(mesh.triangles()((k + 1) % 3, t)) - o;
      const Point w = mesh.vertex(mesh.triangles()((k + 2) % 3, t)) - o;
      q.min_angle = std::min(q.min_angle, std::atan2(std::abs(cross2<double>(u, w)), u.dot(w)));
    }
  }
  return q;
}

}  // namespace tresca
