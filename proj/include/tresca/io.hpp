#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tresca/mesh.hpp"
#include "tresca/optimize.hpp"
#include "tresca/shape_calculus.hpp"

namespace tresca {

/// Columns iter,J,area,p,tau,stick,slip_plus,slip_minus,min_angle followed by
/// the descent monitor aug_before,aug_after.
void write_history_csv(const std::vector<HistoryRow>& history, const std::filesystem::path& path);
std::vector<HistoryRow> read_history_csv(const std::filesystem::path& path);

/// Ordered closed boundary polyline, one `x,y` row per boundary node.
void write_boundary_csv(const Mesh& mesh, const std::filesystem::path& path);
Eigen::Matrix2Xd read_boundary_csv(const std::filesystem::path& path);

struct VtkFields {
  std::vector<std::pair<std::string, Eigen::VectorXd>> scalars;
  std::vector<std::pair<std::string, Eigen::VectorXi>> integers;
  std::vector<std::pair<std::string, VectorField>> vectors;
};

/// Legacy ASCII unstructured grid of triangles with point data.
void write_vtk(const Mesh& mesh, const VtkFields& fields, const std::filesystem::path& path);

struct VtkSummary {
  long points = 0;
  long cells = 0;
  std::vector<std::string> arrays;
};
VtkSummary read_vtk_summary(const std::filesystem::path& path);

void write_fd_csv(const std::vector<FdRow>& rows, const std::filesystem::path& path);
void write_material_csv(const std::vector<MaterialFdRow>& rows,
                        const std::filesystem::path& path);
/// One row per boundary node: node,x,y,u,flux,g,label.
void write_classification_csv(const Mesh& mesh, const ScalarField& u,
                              const Eigen::VectorXd& flux, const Eigen::VectorXd& g,
                              const BoundaryClassification& cls,
                              const std::filesystem::path& path);

/// Rows of a CSV file (header included), split on commas.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

std::string to_string(BoundaryLabel label);

}  // namespace tresca
