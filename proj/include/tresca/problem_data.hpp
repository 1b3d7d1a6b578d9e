#pragma once

#include <Eigen/Core>
#include <numbers>
#include <string>
#include <vector>

#include "tresca/fem.hpp"
#include "tresca/mesh.hpp"

namespace tresca {

/// Source f and friction threshold g as closed forms with gradients.
struct ProblemData {
  ScalarFunction f;
  ScalarFunction g;
};

/// Axis-aligned box [xmin, xmax] x [ymin, ymax] inside which the cut-off of
/// the built-in data equals one.
struct BoundingBox {
  double xmin = -3.0, xmax = 3.0, ymin = -3.0, ymax = 3.0;

  bool contains(const Point& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
};

/// f = (5 - x^2 - y^2 + xy)/4 and g = beta (1 + sin(x)^2 / 0.8).
/// Throws ParameterError unless beta > 0.
ProblemData builtin_problem_data(double beta);

/// Throws GeometryError naming the first vertex outside the box.
void require_inside(const Mesh& mesh, const BoundingBox& box);

/// Smooth perturbation fields used by the derivative checks: "dilation"
/// (x, y), "shear" (y, 0) and "bump", a Gaussian bump centred at (1.3, 0).
/// Throws ParameterError for other names.
VectorField named_velocity(const std::string& name, const Mesh& mesh);
const std::vector<std::string>& velocity_names();

/// Default initial ellipse a = 1.3, b = 1/a, and the target area.
inline constexpr double kEllipseA = 1.3;
inline constexpr double kTargetArea = std::numbers::pi;

}  // namespace tresca
