#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "fvk/common.hpp"

namespace fvk {

/// Quadrature rule on a reference domain. For triangle rules the points are
/// (x, y) reference coordinates and the weights sum to 1/2; for edge rules the
/// points are (s, 0) with s in [0, 1] and the weights sum to 1.
struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int exactness_degree = 0;
};

namespace detail {

// Nodes/weights for the weight (1-x)^a (1+x)^b on [-1,1] via Golub-Welsch on
// the symmetric tridiagonal Jacobi recurrence matrix.
inline void gauss_jacobi(int n, double a, double b, std::vector<double>& x,
                         std::vector<double>& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double s = 2.0 * k + a + b;
    J(k, k) = (k == 0) ? (b - a) / (a + b + 2.0)
                       : (b * b - a * a) / (s * (s + 2.0));
    if (k > 0) {
      double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
      double den = s * s * (s + 1.0) * (s - 1.0);
      double off = std::sqrt(num / den);
      J(k, k - 1) = off;
      J(k - 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  // mu0 = 2^{a+b+1} B(a+1, b+1)
  double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) *
               std::tgamma(b + 1.0) / std::tgamma(a + b + 2.0);
  x.resize(n);
  w.resize(n);
  for (int k = 0; k < n; ++k) {
    x[k] = es.eigenvalues()(k);
    double v0 = es.eigenvectors()(0, k);
    w[k] = mu0 * v0 * v0;
  }
}

// Gauss-Legendre on [0,1].
inline void gauss_legendre01(int n, std::vector<double>& x, std::vector<double>& w) {
  gauss_jacobi(n, 0.0, 0.0, x, w);
  for (int k = 0; k < n; ++k) {
    x[k] = 0.5 * (1.0 + x[k]);
    w[k] *= 0.5;
  }
}

}  // namespace detail

/// Rule on the reference triangle (0,0),(1,0),(0,1) exact for total degree
/// >= `degree`. Conical product of Gauss-Legendre and Gauss-Jacobi(1,0).
inline QuadratureRule triangle_quadrature(int degree) {
  if (degree < 1) throw ParameterError("triangle_quadrature: degree must be >= 1");
  int n = (degree + 2) / 2;  // 2n-1 >= degree
  std::vector<double> xu, wu, xv, wv;
  detail::gauss_legendre01(n, xu, wu);
  detail::gauss_jacobi(n, 1.0, 0.0, xv, wv);
  QuadratureRule rule;
  rule.exactness_degree = 2 * n - 1;
  for (int j = 0; j < n; ++j) {
    double v = 0.5 * (1.0 + xv[j]);
    double wj = wv[j] / 4.0;  // maps weight (1-x) on [-1,1] to (1-v) on [0,1]
    for (int i = 0; i < n; ++i) {
      rule.points.emplace_back(xu[i] * (1.0 - v), v);
      rule.weights.push_back(wu[i] * wj);
    }
  }
  return rule;
}

/// Rule on the unit edge [0,1] exact for degree >= `degree`.
inline QuadratureRule edge_quadrature_rule(int degree) {
  if (degree < 1) throw ParameterError("edge_quadrature_rule: degree must be >= 1");
  int n = (degree + 2) / 2;
  std::vector<double> x, w;
  detail::gauss_legendre01(n, x, w);
  QuadratureRule rule;
  rule.exactness_degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    rule.points.emplace_back(x[i], 0.0);
    rule.weights.push_back(w[i]);
  }
  return rule;
}

/// Default cell rule (degree 7, covers the quintic coupling integrand with margin).
inline const QuadratureRule& cell_quadrature() {
  static const QuadratureRule rule = triangle_quadrature(7);
  return rule;
}

/// Default edge rule (degree 7, covers the degree-6 edge coupling term).
inline const QuadratureRule& edge_quadrature() {
  static const QuadratureRule rule = edge_quadrature_rule(7);
  return rule;
}

}  // namespace fvk
