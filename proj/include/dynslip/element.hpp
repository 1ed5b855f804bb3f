#pragma once

#include <array>

#include "dynslip/common.hpp"

namespace dynslip::element {

// Six-node quadratic triangle. Node order: vertices 0,1,2 then edge nodes on
// (0,1), (1,2), (2,0). Reference coordinates (xi, eta) on the unit triangle.

inline std::array<double, 6> p2_values(const Vec2& r) {
  const double l0 = 1.0 - r[0] - r[1], l1 = r[0], l2 = r[1];
  return {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
          4 * l0 * l1,       4 * l1 * l2,       4 * l2 * l0};
}

/// Reference gradients, one row per shape function.
inline Eigen::Matrix<double, 6, 2> p2_gradients(const Vec2& r) {
  const double l0 = 1.0 - r[0] - r[1], l1 = r[0], l2 = r[1];
  Eigen::Matrix<double, 6, 2> g;
  // dl0 = (-1,-1), dl1 = (1,0), dl2 = (0,1)
  g << -(4 * l0 - 1), -(4 * l0 - 1),
       4 * l1 - 1,    0.0,
       0.0,           4 * l2 - 1,
       4 * (l0 - l1), -4 * l1,
       4 * l2,        4 * l1,
       -4 * l2,       4 * (l0 - l2);
  return g;
}

inline std::array<double, 3> p1_values(const Vec2& r) {
  return {1.0 - r[0] - r[1], r[0], r[1]};
}

inline Eigen::Matrix<double, 3, 2> p1_gradients() {
  Eigen::Matrix<double, 3, 2> g;
  g << -1, -1, 1, 0, 0, 1;
  return g;
}

/// Geometry of one isoparametric element at a reference point.
struct MappedPoint {
  Vec2 x;
  Eigen::Matrix2d jac;       // dx/dr
  double det = 0.0;
  Eigen::Matrix<double, 6, 2> grad;  // physical gradients of the P2 shapes
  std::array<double, 6> value;
};

inline MappedPoint map_point(const std::array<Vec2, 6>& coords, const Vec2& r) {
  MappedPoint p;
  p.value = p2_values(r);
  const auto gref = p2_gradients(r);
  p.x.setZero();
  p.jac.setZero();
  for (int k = 0; k < 6; ++k) {
    p.x += p.value[static_cast<std::size_t>(k)] * coords[static_cast<std::size_t>(k)];
    p.jac += coords[static_cast<std::size_t>(k)] * gref.row(k);
  }
  p.det = p.jac.determinant();
  p.grad = gref * p.jac.inverse();
  return p;
}

/// Reference point on local edge e at edge coordinate t in [0,1], running
/// from the edge's first vertex to its second.
inline Vec2 edge_point(int e, double t) {
  switch (e) {
    case 0: return {t, 0.0};
    case 1: return {1.0 - t, t};
    default: return {0.0, 1.0 - t};
  }
}

/// Quadratic Lagrange basis on [0,1] with nodes 0, 1/2, 1.
inline std::array<double, 3> p2_1d(double t) {
  return {(1 - t) * (1 - 2 * t), 4 * t * (1 - t), t * (2 * t - 1)};
}

}  // namespace dynslip::element
