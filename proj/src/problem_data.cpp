#include "tresca/problem_data.hpp"

#include <cmath>
#include <string>

#include "tresca/errors.hpp"

namespace tresca {

ProblemData builtin_problem_data(double beta) {
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  ProblemData d;
  d.f.value = [](const Point& p) {
    return (5.0 - p.x() * p.x() - p.y() * p.y() + p.x() * p.y()) / 4.0;
  };
  d.f.gradient = [](const Point& p) {
    return Point((-2.0 * p.x() + p.y()) / 4.0, (-2.0 * p.y() + p.x()) / 4.0);
  };
  d.g.value = [beta](const Point& p) {
    const double s = std::sin(p.x());
    return beta * (1.0 + s * s / 0.8);
  };
  d.g.gradient = [beta](const Point& p) {
    return Point(beta * 2.0 * std::sin(p.x()) * std::cos(p.x()) / 0.8, 0.0);
  };
  return d;
}

void require_inside(const Mesh& mesh, const BoundingBox& box) {
  for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i)
    if (!box.contains(mesh.vertex(i)))
      throw GeometryError("vertex " + std::to_string(i) + " left the data box");
}

VectorField named_velocity(const std::string& name, const Mesh& mesh) {
  if (name == "dilation") return interpolate_vector([](const Point& p) { return p; }, mesh);
  if (name == "shear")
    return interpolate_vector([](const Point& p) { return Point(p.y(), 0.0); }, mesh);
  if (name == "bump")
    return interpolate_vector(
        [](const Point& p) {
          const double r2 = (p - Point(1.3, 0.0)).squaredNorm();
          return Point(std::exp(-r2 / 0.18), 0.5 * std::exp(-r2 / 0.18));
        },
        mesh);
  throw ParameterError("unknown velocity field '" + name + "'");
}

const std::vector<std::string>& velocity_names() {
  static const std::vector<std::string> names{"dilation", "shear", "bump"};
  return names;
}

}  // namespace tresca
