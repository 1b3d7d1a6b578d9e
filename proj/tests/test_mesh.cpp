#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "support.hpp"
#include "tresca/errors.hpp"
#include "tresca/fem.hpp"
#include "tresca/mesh.hpp"

using namespace tresca;
using std::numbers::pi;

TEST_CASE("ellipse mesher: areas, counts and boundary placement") {
  const Mesh disk = generate_ellipse_mesh(1.0, 1.0, 256, 64);
  CHECK(std::abs(area(disk) - pi) <= 0.005 * pi);

  const Mesh ell = generate_ellipse_mesh(1.3, 1 / 1.3, 128, 22);
  CHECK(std::abs(area(ell) - pi) <= 0.005 * pi);
  CHECK(ell.num_boundary_nodes() == 128);
  for (int v : ell.boundary_nodes()) {
    const Point x = ell.vertex(v);
    const double r = x.x() * x.x() / (1.3 * 1.3) + x.y() * x.y() * 1.3 * 1.3;
    CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
  }

  const Mesh tiny = generate_ellipse_mesh(1.0, 1.0, 4, 1);
  CHECK(tiny.num_vertices() == 5);
  CHECK(tiny.num_triangles() == 4);
  for (Eigen::Index t = 0; t < tiny.num_triangles(); ++t) CHECK(tiny.triangle_area(t) > 0.0);

  CHECK_THROWS_AS(generate_ellipse_mesh(-1.0, 1.0, 16, 4), ParameterError);
  CHECK_THROWS_AS(generate_ellipse_mesh(1.0, 1.0, 2, 4), ParameterError);
  CHECK_THROWS_AS(generate_ellipse_mesh(1.0, 1.0, 16, 0), ParameterError);
}

TEST_CASE("mesh validation") {
  Eigen::Matrix2Xd v(2, 3);
  v << 0, 1, 0, 0, 0, 1;
  Eigen::Matrix3Xi ccw(3, 1), cw(3, 1);
  ccw << 0, 1, 2;
  cw << 0, 2, 1;
  Eigen::Matrix2Xi loop(2, 3);
  loop << 0, 1, 2, 1, 2, 0;
  CHECK(area(Mesh(v, ccw, loop)) == 0.5);
  CHECK_THROWS_AS(Mesh(v, cw, loop), ValidationError);

  Eigen::Matrix2Xd v6(2, 6);
  v6 << 0, 1, 0, 3, 4, 3, 0, 0, 1, 0, 0, 1;
  Eigen::Matrix3Xi two(3, 2);
  two << 0, 3, 1, 4, 2, 5;
  Eigen::Matrix2Xi loops(2, 6);
  loops << 0, 1, 2, 3, 4, 5, 1, 2, 0, 4, 5, 3;
  CHECK_THROWS_AS(Mesh(v6, two, loops), ValidationError);

  Eigen::Matrix2Xi bad_index(2, 3);
  bad_index << 0, 1, 7, 1, 7, 0;
  CHECK_THROWS_AS(Mesh(v, ccw, bad_index), ValidationError);
}

TEST_CASE("mesh text round trip") {
  const Mesh m = generate_ellipse_mesh(1.0, 1.0, 4, 1);
  const auto path = std::filesystem::temp_directory_path() / "tresca_roundtrip.mesh";
  save_mesh(m, path);
  const Mesh back = load_mesh(path);
  CHECK(back.vertices() == m.vertices());
  CHECK(back.triangles() == m.triangles());
  CHECK(back.boundary_edges() == m.boundary_edges());

  const Mesh fine = generate_ellipse_mesh(1.3, 1 / 1.3, 37, 5);
  CHECK(parse_mesh(format_mesh(fine)).vertices() == fine.vertices());

  CHECK_THROWS_AS(parse_mesh("3 1 3\n0 0\n1 0\n0 1\n0 2 1\n0 1\n1 2\n2 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_mesh("3 1 3\n0 0\n1 0\n"), ValidationError);
  CHECK_NOTHROW(parse_mesh("# a triangle\n3 1 3\n0 0\n1 0\n0 1 # apex\n0 1 2\n0 1\n1 2\n2 0\n"));
  CHECK_THROWS_AS(load_mesh("/nonexistent/file.mesh"), IoError);
}

TEST_CASE("boundary geometry invariants") {
  const Mesh m = generate_ellipse_mesh(1.3, 1 / 1.3, 200, 20);
  const BoundaryGeometry g = boundary_geometry(m);
  CHECK(g.weight.minCoeff() > 0.0);
  CHECK(g.weight.sum() == doctest::Approx(perimeter(m)).epsilon(1e-10));
  for (Eigen::Index b = 0; b < m.num_boundary_nodes(); ++b) {
    CHECK(std::abs(g.normal.col(b).norm() - 1.0) <= 1e-12);
    CHECK(g.normal.col(b).dot(m.vertex(m.boundary_nodes()[b])) > 0.0);
  }
}

TEST_CASE("curvature on circles, ellipses and straight sides") {
  const Mesh circle = generate_ellipse_mesh(2.0, 2.0, 512, 64);
  for (CurvatureMethod method : {CurvatureMethod::Osculating, CurvatureMethod::NormalExtension}) {
    const BoundaryGeometry g = boundary_geometry(circle, method);
    CHECK((g.curvature.array() - 0.5).abs().maxCoeff() <= 0.005);
  }

  const double a = 1.3, b = 1 / 1.3;
  const Mesh ell = generate_ellipse_mesh(a, b, 400, 40);
  const BoundaryGeometry ge = boundary_geometry(ell);
  Eigen::Index tip = 0;
  for (Eigen::Index k = 0; k < ell.num_boundary_nodes(); ++k)
    if (ell.vertex(ell.boundary_nodes()[k]).x() > ell.vertex(ell.boundary_nodes()[tip]).x())
      tip = k;
  CHECK(std::abs(ge.curvature[tip] - a / (b * b)) <= 0.02 * a / (b * b));

  const Mesh square = testing::square_mesh(8);
  const BoundaryGeometry gs = boundary_geometry(square);
  const int mid = square.boundary_index(4);  // (0.5, 0) on the bottom side
  CHECK(std::abs(gs.curvature[mid]) <= 1e-8);
}

TEST_CASE("deformation") {
  const Mesh m = generate_ellipse_mesh(1.0, 1.0, 64, 16);
  const VectorField zero = VectorField::Zero(2, m.num_vertices());
  CHECK(deform_mesh(m, zero, 1.0).vertices() == m.vertices());
  const VectorField dil = m.vertices();
  CHECK(deform_mesh(m, dil, 0.0).vertices() == m.vertices());
  for (double t : {0.1, 0.3, 0.5})
    CHECK(area(deform_mesh(m, dil, t)) == doctest::Approx(area(m) * (1 + t) * (1 + t)).epsilon(1e-12));

  VectorField squash = VectorField::Zero(2, m.num_vertices());
  squash.col(0) = Point(5.0, 0.0);  // drag the centre far outside
  CHECK_THROWS_AS(deform_mesh(m, squash, 1.0), InversionError);
  try {
    deform_mesh(m, squash, 1.0);
  } catch (const InversionError& e) {
    CHECK(e.min_signed_area() <= 0.0);
  }
}

TEST_CASE("first-order area change equals the boundary flux of V") {
  const Mesh m = generate_ellipse_mesh(1.3, 1 / 1.3, 1024, 64);
  const VectorField v = interpolate_vector(
      [](const Point& x) { return Point(std::sin(x.y()) + 0.3 * x.x(), x.x() * x.y()); }, m);
  const BoundaryGeometry g = boundary_geometry(m);
  double flux = 0.0;
  for (Eigen::Index b = 0; b < m.num_boundary_nodes(); ++b)
    flux += g.weight[b] * v.col(m.boundary_nodes()[b]).dot(g.normal.col(b));
  const double t = 1e-3;
  const double fd = (area(deform_mesh(m, v, t)) - area(m)) / t;
  CHECK(std::abs(fd - flux) <= 0.02 * std::abs(flux));
}

TEST_CASE("quality metrics") {
  const Mesh square = testing::square_mesh(4);
  const MeshQuality q = quality(square);
  CHECK(q.min_angle == doctest::Approx(pi / 4).epsilon(1e-12));
  CHECK(q.min_area == doctest::Approx(1.0 / 32).epsilon(1e-12));
}
