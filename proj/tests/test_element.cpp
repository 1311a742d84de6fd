#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fvk/element.hpp"
#include "fvk/quadrature.hpp"

using namespace fvk;

namespace {

// Exact integral of x^i y^j over the reference triangle: i! j! / (i+j+2)!.
double monomial_integral(int i, int j) {
  auto fact = [](int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  return fact(i) * fact(j) / fact(i + j + 2);
}

double integrate_monomial(const QuadratureRule& rule, int i, int j) {
  double sum = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q)
    sum += rule.weights[q] * std::pow(rule.points[q].x(), i) *
           std::pow(rule.points[q].y(), j);
  return sum;
}

}  // namespace

TEST(Quadrature, CellRuleExactnessSweep) {
  const QuadratureRule& rule = cell_quadrature();
  ASSERT_GE(rule.exactness_degree, 6);
  for (int d = 0; d <= rule.exactness_degree; ++d)
    for (int i = 0; i <= d; ++i) {
      int j = d - i;
      EXPECT_NEAR(integrate_monomial(rule, i, j), monomial_integral(i, j), 1e-13)
          << "monomial x^" << i << " y^" << j;
    }
}

TEST(Quadrature, CellWeightsSumToHalf) {
  const QuadratureRule& rule = cell_quadrature();
  double sum = 0.0;
  for (double w : rule.weights) sum += w;
  EXPECT_NEAR(sum, 0.5, 1e-14);
}

TEST(Quadrature, CubicCrossTerm) {
  // int x^3 y^3 over the reference triangle = 1/1120.
  EXPECT_NEAR(integrate_monomial(cell_quadrature(), 3, 3), 1.0 / 1120.0, 1e-15);
}

TEST(Quadrature, EdgeRule) {
  const QuadratureRule& rule = edge_quadrature();
  ASSERT_GE(rule.exactness_degree, 7);
  double sum = 0.0, x7 = 0.0;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    sum += rule.weights[q];
    x7 += rule.weights[q] * std::pow(rule.points[q].x(), 7);
  }
  EXPECT_NEAR(sum, 1.0, 1e-14);
  EXPECT_NEAR(x7, 1.0 / 8.0, 1e-15);
}

TEST(Element, KroneckerProperty) {
  const P3ReferenceElement& el = p3_element();
  std::array<double, 10> vals;
  std::array<Vec2, 10> grads;
  std::array<Mat2, 10> hess;
  for (int n = 0; n < 10; ++n) {
    el.eval(el.nodes[n], vals, grads, hess);
    for (int i = 0; i < 10; ++i)
      EXPECT_NEAR(vals[i], i == n ? 1.0 : 0.0, 1e-13) << "node " << n << " basis " << i;
  }
}

TEST(Element, PartitionOfUnityAndDerivativeSums) {
  const P3ReferenceElement& el = p3_element();
  std::array<double, 10> vals;
  std::array<Vec2, 10> grads;
  std::array<Mat2, 10> hess;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    double a = uni(rng), b = uni(rng) * (1.0 - a);
    el.eval(Vec2(a, b), vals, grads, hess);
    double s = 0.0;
    Vec2 gs = Vec2::Zero();
    Mat2 hs = Mat2::Zero();
    for (int i = 0; i < 10; ++i) {
      s += vals[i];
      gs += grads[i];
      hs += hess[i];
    }
    EXPECT_NEAR(s, 1.0, 1e-13);
    EXPECT_NEAR(gs.norm(), 0.0, 1e-12);
    EXPECT_NEAR(hs.norm(), 0.0, 1e-12);
  }
}

TEST(Element, GradientMatchesFiniteDifference) {
  const P3ReferenceElement& el = p3_element();
  std::array<double, 10> vp;
  std::array<Vec2, 10> grads, gtmp;
  std::array<Mat2, 10> hess, htmp;
  Vec2 x(0.23, 0.31);
  el.eval(x, vp, grads, hess);
  const double h = 1e-6;
  for (int d = 0; d < 2; ++d) {
    Vec2 dx = Vec2::Zero();
    dx[d] = h;
    std::array<double, 10> fp, fm;
    el.eval(x + dx, fp, gtmp, htmp);
    el.eval(x - dx, fm, gtmp, htmp);
    for (int i = 0; i < 10; ++i)
      EXPECT_NEAR(grads[i][d], (fp[i] - fm[i]) / (2 * h), 1e-8);
  }
}

TEST(Element, HessianIsAffineAndMatchesFDOfGradient) {
  const P3ReferenceElement& el = p3_element();
  std::array<double, 10> vals;
  std::array<Vec2, 10> g0, gp, gm;
  std::array<Mat2, 10> hess, htmp;
  Vec2 x(0.17, 0.4);
  el.eval(x, vals, g0, hess);
  const double h = 1e-4;
  for (int d = 0; d < 2; ++d) {
    Vec2 dx = Vec2::Zero();
    dx[d] = h;
    el.eval(x + dx, vals, gp, htmp);
    el.eval(x - dx, vals, gm, htmp);
    for (int i = 0; i < 10; ++i)
      for (int c = 0; c < 2; ++c)
        EXPECT_NEAR(hess[i](c, d), (gp[i][c] - gm[i][c]) / (2 * h), 1e-7);
  }
}

TEST(Element, CubicReproduction) {
  // Interpolating a cubic at the 10 nodes reproduces it at random points.
  const P3ReferenceElement& el = p3_element();
  auto f = [](const Vec2& p) {
    return 1.0 + 2 * p.x() - 3 * p.y() + 0.5 * p.x() * p.y() + p.x() * p.x() * p.x() -
           2 * p.y() * p.y() * p.x() + 0.25 * p.y() * p.y() * p.y();
  };
  std::array<double, 10> coeff;
  for (int i = 0; i < 10; ++i) coeff[i] = f(el.nodes[i]);
  std::array<double, 10> vals;
  std::array<Vec2, 10> grads;
  std::array<Mat2, 10> hess;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    double a = uni(rng), b = uni(rng) * (1.0 - a);
    el.eval(Vec2(a, b), vals, grads, hess);
    double interp = 0.0;
    for (int i = 0; i < 10; ++i) interp += coeff[i] * vals[i];
    EXPECT_NEAR(interp, f(Vec2(a, b)), 1e-12);
  }
}

TEST(AffineMapTest, IdentityAndScaling) {
  AffineMap id = AffineMap::from_triangle(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
  Vec2 g(1.5, -2.0);
  Mat2 h;
  h << 2, 1, 1, 3;
  Vec2 gp;
  Mat2 hp;
  physical_derivatives(id, g, h, gp, hp);
  EXPECT_NEAR((gp - g).norm(), 0.0, 1e-15);
  EXPECT_NEAR((hp - h).norm(), 0.0, 1e-15);

  double s = 2.5;
  AffineMap sc = AffineMap::from_triangle(Vec2(0, 0), Vec2(s, 0), Vec2(0, s));
  physical_derivatives(sc, g, h, gp, hp);
  EXPECT_NEAR((gp - g / s).norm(), 0.0, 1e-14);
  EXPECT_NEAR((hp - h / (s * s)).norm(), 0.0, 1e-14);
}

TEST(AffineMapTest, DegenerateThrows) {
  EXPECT_THROW(AffineMap::from_triangle(Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)),
               GeometryError);
  // Clockwise orientation is also rejected.
  EXPECT_THROW(AffineMap::from_triangle(Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)),
               GeometryError);
}

TEST(AffineMapTest, ChainRuleMatchesFiniteDifference) {
  // Compose a cubic with a random affine map and compare derivatives.
  AffineMap map = AffineMap::from_triangle(Vec2(0.2, -0.1), Vec2(1.3, 0.4), Vec2(0.5, 1.1));
  auto f_ref = [](const Vec2& r) {
    return r.x() * r.x() * r.y() + 0.5 * r.y() * r.y() - r.x();
  };
  auto grad_ref = [](const Vec2& r) {
    return Vec2(2 * r.x() * r.y() - 1, r.x() * r.x() + r.y());
  };
  auto hess_ref = [](const Vec2& r) {
    Mat2 h;
    h << 2 * r.y(), 2 * r.x(), 2 * r.x(), 1.0;
    return h;
  };
  Vec2 ref(0.3, 0.25);
  Vec2 x = map.to_physical(ref);
  Vec2 gp;
  Mat2 hp;
  physical_derivatives(map, grad_ref(ref), hess_ref(ref), gp, hp);

  auto f_phys = [&](const Vec2& p) { return f_ref(map.to_reference(p)); };
  const double hg = 1e-6, hh = 1e-4;  // cubic: FD truncation vanishes for Hessian
  for (int d = 0; d < 2; ++d) {
    Vec2 dx = Vec2::Zero();
    dx[d] = hg;
    EXPECT_NEAR(gp[d], (f_phys(x + dx) - f_phys(x - dx)) / (2 * hg), 1e-7);
    dx[d] = hh;
    for (int c = 0; c < 2; ++c) {
      Vec2 dy = Vec2::Zero();
      dy[c] = hh;
      double fpp = f_phys(x + dx + dy), fpm = f_phys(x + dx - dy);
      double fmp = f_phys(x - dx + dy), fmm = f_phys(x - dx - dy);
      EXPECT_NEAR(hp(c, d), (fpp - fpm - fmp + fmm) / (4 * hh * hh), 1e-7);
    }
  }
}

TEST(Element, QuadraticInterpolantHasConstantHessian) {
  const P3ReferenceElement& el = p3_element();
  Mat2 target;
  target << 3.0, -1.0, -1.0, 2.0;
  auto f = [&](const Vec2& p) { return 0.5 * p.dot(target * p); };
  std::array<double, 10> coeff;
  for (int i = 0; i < 10; ++i) coeff[i] = f(el.nodes[i]);
  std::array<double, 10> vals;
  std::array<Vec2, 10> grads;
  std::array<Mat2, 10> hess;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    double a = uni(rng), b = uni(rng) * (1.0 - a);
    el.eval(Vec2(a, b), vals, grads, hess);
    Mat2 hsum = Mat2::Zero();
    for (int i = 0; i < 10; ++i) hsum += coeff[i] * hess[i];
    EXPECT_NEAR((hsum - target).norm(), 0.0, 1e-11);
  }
}
