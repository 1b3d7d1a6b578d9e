#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "tresca/mesh.hpp"
#include "tresca/problem_data.hpp"
#include "tresca/shape_calculus.hpp"
#include "tresca/vi_solve.hpp"

namespace tresca {

enum class GradientForm { Volume, Boundary };

struct OptimConfig {
  double tau = 0.05;
  double mu = 0.5;
  double lambda_target = kTargetArea;
  double p0 = 0.0;
  /// Augmented-Lagrangian weight b: each step uses the multiplier
  /// p + b (area - lambda_target). Plain Uzawa when 0. A small positive value
  /// damps the area oscillation that appears when J is concave in the area.
  double penalty = 0.0;
  int max_outer = 400;
  double stop_tol = 1e-7;
  int check_every = 20;
  GradientForm gradient_form = GradientForm::Boundary;
  EnergyKind problem = EnergyKind::Tresca;
  double beta = 0.49;
  CurvatureMethod curvature = CurvatureMethod::Osculating;
  BoundingBox bbox;
  ViOptions vi;
};

/// Throws ConfigError naming the first invalid field.
void validate(const OptimConfig& config);

/// Shape-gradient information at the current mesh, in the form chosen by the
/// configuration: the assembled functional G for the volume form or the
/// boundary density D for the boundary form.
struct GradientData {
  GradientForm form = GradientForm::Volume;
  VectorField functional;   // volume form
  Eigen::VectorXd density;  // boundary form
  BoundaryGeometry geometry;
};

GradientData gradient_data(const Mesh& mesh, const State& state, const ProblemData& data,
                           EnergyKind kind, GradientForm form,
                           CurvatureMethod curvature = CurvatureMethod::Osculating,
                           const ViOptions& opt = {});

/// Exact derivative of the enclosed area with respect to each vertex.
VectorField area_gradient(const Mesh& mesh);

/// Riesz representative in H1 of minus the augmented shape derivative.
VectorField descent_direction(const Mesh& mesh, const GradientData& grad, double p,
                              const ViOptions& opt = {});

/// J'(V) + p |Omega|'(V), in the same form as the gradient data.
double augmented_derivative(const Mesh& mesh, const GradientData& grad, double p,
                            const VectorField& velocity);

/// p + mu (area - lambda_target).
inline double uzawa_update(double p, double mu, double area, double lambda_target) {
  return p + mu * (area - lambda_target);
}

struct HistoryRow {
  int iter = 0;
  double energy = 0.0;      // J at the start of the iteration
  double area = 0.0;        // after the deformation
  double p = 0.0;           // multiplier used for the step
  double tau = 0.0;         // step actually taken
  int stick = 0, slip_plus = 0, slip_minus = 0;
  double min_angle = 0.0;   // degrees, after the deformation
  double aug_before = 0.0;  // J + p (|Omega| - lambda) before the step
  double aug_after = 0.0;   // same functional, same p, after the step
};

struct OptimResult {
  Mesh mesh;
  std::vector<HistoryRow> history;
  bool converged = false;
  bool failed = false;
  std::string message;
};

using IterationHook = std::function<void(int iter, const Mesh&, const State&)>;

OptimResult optimize(const Mesh& mesh0, const OptimConfig& config,
                     const IterationHook& hook = {});

struct BoundaryDistance {
  double hausdorff = 0.0;
  double mean = 0.0;
};

/// Symmetric point-to-polyline distances between the two boundaries.
BoundaryDistance compare_boundaries(const Mesh& a, const Mesh& b);

/// Largest distance between two boundary vertices.
double boundary_diameter(const Mesh& mesh);

}  // namespace tresca
