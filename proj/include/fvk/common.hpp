#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace fvk {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Geometric predicate tolerance used throughout (point location,
/// orientation checks, boundary snapping).
inline constexpr double kGeomEps = 1e-12;

// Error taxonomy. Solver non-convergence is reported, not thrown.
struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LocationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LinearAlgebraError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cofactor of a 2x2 matrix: cof(M) = [[m22, -m21], [-m12, m11]].
/// Satisfies M : cof(M) = 2 det(M) and cof(I) = I.
inline Mat2 cof(const Mat2& m) {
  Mat2 c;
  c << m(1, 1), -m(1, 0), -m(0, 1), m(0, 0);
  return c;
}

/// Frobenius inner product A : B.
inline double ddot(const Mat2& a, const Mat2& b) {
  return a.cwiseProduct(b).sum();
}

/// Monge-Ampere bracket of two Hessians, [f,g] = cof(Hf) : Hg.
inline double bracket(const Mat2& hf, const Mat2& hg) { return ddot(cof(hf), hg); }

}  // namespace fvk
