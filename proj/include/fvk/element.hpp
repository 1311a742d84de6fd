#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>

#include "fvk/common.hpp"
#include "fvk/quadrature.hpp"

namespace fvk {

/// Affine reference-to-physical map x = p0 + J * ref.
struct AffineMap {
  Mat2 jacobian;
  Mat2 inverse;
  double det = 0.0;
  Vec2 origin;

  static AffineMap from_triangle(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    AffineMap m;
    m.origin = p0;
    m.jacobian.col(0) = p1 - p0;
    m.jacobian.col(1) = p2 - p0;
    m.det = m.jacobian.determinant();
    if (m.det <= 0.0)
      throw GeometryError("AffineMap: non-positive Jacobian determinant");
    m.inverse = m.jacobian.inverse();
    return m;
  }

  Vec2 to_physical(const Vec2& ref) const { return origin + jacobian * ref; }
  Vec2 to_reference(const Vec2& phys) const { return inverse * (phys - origin); }
};

/// Chain rule for an affine map: g_phys = J^{-T} g_ref, H_phys = J^{-T} H_ref J^{-1}.
inline void physical_derivatives(const AffineMap& map, const Vec2& grad_ref,
                                 const Mat2& hess_ref, Vec2& grad_phys,
                                 Mat2& hess_phys) {
  if (map.det <= 0.0) throw GeometryError("physical_derivatives: degenerate map");
  Mat2 invT = map.inverse.transpose();
  grad_phys = invT * grad_ref;
  hess_phys = invT * hess_ref * map.inverse;
}

/// Cubic Lagrange triangle on the reference element (0,0),(1,0),(0,1).
///
/// Node ordering (fixed; the dof map depends on it):
///   0..2  vertices (0,0), (1,0), (0,1)
///   3,4   edge (0,1) at thirds:  (1/3,0), (2/3,0)
///   5,6   edge (1,2) at thirds:  (2/3,1/3), (1/3,2/3)
///   7,8   edge (2,0) at thirds:  (0,2/3), (0,1/3)
///   9     centroid (1/3,1/3)
struct P3ReferenceElement {
  static constexpr int n_nodes = 10;

  std::array<Vec2, n_nodes> nodes;

  P3ReferenceElement() {
    nodes = {Vec2(0, 0),           Vec2(1, 0),           Vec2(0, 1),
             Vec2(1.0 / 3, 0),     Vec2(2.0 / 3, 0),     Vec2(2.0 / 3, 1.0 / 3),
             Vec2(1.0 / 3, 2.0 / 3), Vec2(0, 2.0 / 3),   Vec2(0, 1.0 / 3),
             Vec2(1.0 / 3, 1.0 / 3)};
  }

  /// Values, gradients and Hessians of all 10 basis functions at a reference
  /// point. Exact cubic Lagrange; Hessians are affine in the point.
  void eval(const Vec2& ref, std::array<double, n_nodes>& values,
            std::array<Vec2, n_nodes>& grads, std::array<Mat2, n_nodes>& hessians) const {
    // Barycentric coordinates and their constant reference gradients.
    const double l[3] = {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
    static const Vec2 dl[3] = {Vec2(-1, -1), Vec2(1, 0), Vec2(0, 1)};

    // Each basis function is c * f1 * f2 * f3 with fi affine in one or two
    // barycentric coordinates; product rule gives exact derivatives.
    struct Lin {
      double value;
      Vec2 grad;
    };
    auto lam = [&](int a) { return Lin{l[a], dl[a]}; };
    auto aff = [&](int a, double scale, double shift) {
      return Lin{scale * l[a] + shift, scale * dl[a]};
    };
    auto emit = [&](int idx, double c, const Lin& f1, const Lin& f2, const Lin& f3) {
      values[idx] = c * f1.value * f2.value * f3.value;
      grads[idx] = c * (f1.grad * f2.value * f3.value + f2.grad * f1.value * f3.value +
                        f3.grad * f1.value * f2.value);
      Mat2 h = Mat2::Zero();
      h += (f1.grad * f2.grad.transpose() + f2.grad * f1.grad.transpose()) * f3.value;
      h += (f1.grad * f3.grad.transpose() + f3.grad * f1.grad.transpose()) * f2.value;
      h += (f2.grad * f3.grad.transpose() + f3.grad * f2.grad.transpose()) * f1.value;
      hessians[idx] = c * h;
    };

    // Vertices: (1/2) l (3l - 1)(3l - 2)
    for (int a = 0; a < 3; ++a)
      emit(a, 0.5, lam(a), aff(a, 3, -1), aff(a, 3, -2));
    // Edge nodes: (9/2) la lb (3lnear - 1), near = the closer endpoint.
    const int ev[3][2] = {{0, 1}, {1, 2}, {2, 0}};
    for (int e = 0; e < 3; ++e) {
      int a = ev[e][0], b = ev[e][1];
      emit(3 + 2 * e, 4.5, lam(a), lam(b), aff(a, 3, -1));
      emit(3 + 2 * e + 1, 4.5, lam(a), lam(b), aff(b, 3, -1));
    }
    // Interior: 27 l0 l1 l2
    emit(9, 27.0, lam(0), lam(1), lam(2));
  }
};

inline const P3ReferenceElement& p3_element() {
  static const P3ReferenceElement elem;
  return elem;
}

}  // namespace fvk
