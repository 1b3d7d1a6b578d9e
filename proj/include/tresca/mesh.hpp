#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace tresca {

using Point = Eigen::Vector2d;
/// One 2-vector per mesh vertex, stored column-wise.
using VectorField = Eigen::Matrix2Xd;
/// One value per mesh vertex (P1 nodal coefficients).
using ScalarField = Eigen::VectorXd;

/// Conforming triangle mesh with a single closed, positively oriented boundary.
///
/// The constructor validates the data and throws ValidationError naming the
/// offending entity. Boundary edges are stored in chain order: edge b runs from
/// boundary node b to boundary node b+1 (cyclically), so boundary node b is
/// shared by edges b-1 and b.
class Mesh {
 public:
  Mesh() = default;
  Mesh(Eigen::Matrix2Xd vertices, Eigen::Matrix3Xi triangles,
       Eigen::Matrix2Xi boundary_edges);

  const Eigen::Matrix2Xd& vertices() const { return vertices_; }
  const Eigen::Matrix3Xi& triangles() const { return triangles_; }
  const Eigen::Matrix2Xi& boundary_edges() const { return boundary_edges_; }
  const std::vector<int>& boundary_nodes() const { return boundary_nodes_; }

  Eigen::Index num_vertices() const { return vertices_.cols(); }
  Eigen::Index num_triangles() const { return triangles_.cols(); }
  Eigen::Index num_boundary_nodes() const {
    return static_cast<Eigen::Index>(boundary_nodes_.size());
  }

  Point vertex(Eigen::Index i) const { return vertices_.col(i); }
  /// Position of vertex i in boundary_nodes(), or -1 for interior vertices.
  int boundary_index(Eigen::Index vertex) const { return boundary_index_[vertex]; }
  bool on_boundary(Eigen::Index vertex) const { return boundary_index_[vertex] >= 0; }

  double triangle_area(Eigen::Index t) const;
  /// Triangle that owns boundary edge b.
  int boundary_edge_triangle(Eigen::Index b) const { return edge_triangle_[b]; }

 private:
  Eigen::Matrix2Xd vertices_;
  Eigen::Matrix3Xi triangles_;
  Eigen::Matrix2Xi boundary_edges_;
  std::vector<int> boundary_nodes_;
  std::vector<int> boundary_index_;
  std::vector<int> edge_triangle_;
};

/// Concentric-ring mesh of the ellipse x^2/a^2 + y^2/b^2 <= 1.
///
/// Ring k (k = 1..n_rings) carries round(n_theta k / n_rings) nodes (at least
/// three), neighbouring rings are stitched by angle, and the innermost ring is
/// fanned to a centre vertex. The outer ring has exactly n_theta nodes on the
/// ellipse.
Mesh generate_ellipse_mesh(double a, double b, int n_theta, int n_rings);

/// Text format: `nv nt nb`, nv lines `x y`, nt lines `i j k`, nb lines `i j`.
/// `#` starts a comment. Coordinates are written in shortest round-trip form.
Mesh load_mesh(const std::filesystem::path& path);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh parse_mesh(std::string_view text);
std::string format_mesh(const Mesh& mesh);

enum class CurvatureMethod { Osculating, NormalExtension };

struct BoundaryGeometry {
  Eigen::Matrix2Xd normal;    // per boundary node, outward unit
  Eigen::VectorXd weight;     // per boundary node, half the adjacent edge lengths
  Eigen::VectorXd curvature;  // per boundary node, positive on convex parts
  Eigen::Matrix2Xd edge_normal;  // per boundary edge, outward unit
  Eigen::VectorXd edge_length;   // per boundary edge
};

BoundaryGeometry boundary_geometry(const Mesh& mesh,
                                   CurvatureMethod method = CurvatureMethod::Osculating);

/// Moves every vertex x to x + tau V(x). Throws InversionError when a triangle
/// loses positive orientation.
Mesh deform_mesh(const Mesh& mesh, const VectorField& velocity, double tau);

double area(const Mesh& mesh);
double perimeter(const Mesh& mesh);
/// Lumped boundary measure only (cheaper than the full boundary_geometry).
Eigen::VectorXd boundary_weights(const Mesh& mesh);

struct MeshQuality {
  double min_angle;  // radians
  double min_area;
};
MeshQuality quality(const Mesh& mesh);

}  // namespace tresca
