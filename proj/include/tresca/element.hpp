#pragma once

// Per-triangle kernels for linear (P1) Lagrange elements. Everything here is
// templated on the scalar type so the same code can be evaluated in extended
// precision by the test oracles.

#include <Eigen/Core>
#include <Eigen/LU>
#include <array>
#include <cmath>

namespace tresca {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

template <typename Scalar>
Scalar signed_area(const Vec2<Scalar>& a, const Vec2<Scalar>& b,
                   const Vec2<Scalar>& c) {
  return cross2<Scalar>(b - a, c - a) / Scalar(2);
}

/// Constant gradients of the three barycentric basis functions, one per column.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 3> p1_gradients(const Vec2<Scalar>& a,
                                         const Vec2<Scalar>& b,
                                         const Vec2<Scalar>& c) {
  const Scalar twice_area = cross2<Scalar>(b - a, c - a);
  Eigen::Matrix<Scalar, 2, 3> grad;
  grad << b.y() - c.y(), c.y() - a.y(), a.y() - b.y(),  //
      c.x() - b.x(), a.x() - c.x(), b.x() - a.x();
  return grad / twice_area;
}

/// Element stiffness  K_ij = area * (C grad phi_j) . grad phi_i.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> p1_stiffness(const Vec2<Scalar>& a,
                                         const Vec2<Scalar>& b,
                                         const Vec2<Scalar>& c,
                                         const Mat2<Scalar>& coeff) {
  const Scalar area = signed_area<Scalar>(a, b, c);
  const Eigen::Matrix<Scalar, 2, 3> grad = p1_gradients<Scalar>(a, b, c);
  return area * grad.transpose() * coeff * grad;
}

/// Consistent element mass matrix  (area/12) [[2,1,1],[1,2,1],[1,1,2]].
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> p1_mass(Scalar area) {
  Eigen::Matrix<Scalar, 3, 3> m = Eigen::Matrix<Scalar, 3, 3>::Constant(Scalar(1));
  m.diagonal().setConstant(Scalar(2));
  return m * (area / Scalar(12));
}

/// Pulled-back coefficients of a constant-gradient map x -> x + t V(x).
template <typename Scalar>
struct ElementPullback {
  Mat2<Scalar> deformation;  // F = I + t grad V
  Scalar jacobian;           // det F
  Mat2<Scalar> coefficient;  // det F * F^{-1} F^{-T}
};

template <typename Scalar>
ElementPullback<Scalar> element_pullback(const Mat2<Scalar>& grad_v, Scalar t) {
  ElementPullback<Scalar> out;
  out.deformation = Mat2<Scalar>::Identity() + t * grad_v;
  out.jacobian = out.deformation.determinant();
  const Mat2<Scalar> inv = out.deformation.inverse();
  out.coefficient = out.jacobian * inv * inv.transpose();
  return out;
}

/// det F * |F^{-T} n|: length ratio of a boundary edge with unit normal n.
template <typename Scalar>
Scalar tangential_jacobian(const Mat2<Scalar>& deformation,
                           const Vec2<Scalar>& normal) {
  const Mat2<Scalar> inv_t = deformation.inverse().transpose();
  return deformation.determinant() * (inv_t * normal).norm();
}

/// Symmetric 6-point rule on the reference triangle, exact for degree 4.
/// Rows are barycentric coordinates; weights sum to one.
struct TriangleRule {
  std::array<std::array<double, 3>, 6> points;
  std::array<double, 6> weights;
};

inline const TriangleRule& triangle_rule() {
  static const TriangleRule rule = [] {
    constexpr double a = 0.445948490915965;
    constexpr double wa = 0.223381589678011;
    constexpr double b = 0.091576213509771;
    constexpr double wb = 0.109951743655322;
    TriangleRule r{};
    r.points = {{{a, a, 1 - 2 * a},
                 {a, 1 - 2 * a, a},
                 {1 - 2 * a, a, a},
                 {b, b, 1 - 2 * b},
                 {b, 1 - 2 * b, b},
                 {1 - 2 * b, b, b}}};
    r.weights = {wa, wa, wa, wb, wb, wb};
    return r;
  }();
  return rule;
}

/// Three-point Gauss rule on [0,1], exact for degree 5.
struct EdgeRule {
  std::array<double, 3> points;
  std::array<double, 3> weights;
};

inline const EdgeRule& edge_rule() {
  static const EdgeRule rule = [] {
    const double s = std::sqrt(3.0 / 5.0) / 2.0;
    return EdgeRule{{0.5 - s, 0.5, 0.5 + s}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
  }();
  return rule;
}

}  // namespace tresca
