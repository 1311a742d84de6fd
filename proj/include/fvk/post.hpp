#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "fvk/analytic.hpp"
#include "fvk/common.hpp"
#include "fvk/forms.hpp"
#include "fvk/space.hpp"

namespace fvk {

/// Cellwise quadrature sums of the energy integrals plus the load works.
struct EnergyBreakdown {
  double membrane = 0.0;       // 1/2 sum_T |Hv|^2
  double bending = 0.0;        // c_nu/2 sum_T |Hw|^2
  double coupling = 0.0;       // 1/2 sum_T cof(Hv) : (grad w ⊗ grad w)
  double dirac_work = 0.0;     // beta^2 sum_i s_i v(y_i)
  double pressure_work = 0.0;  // gamma beta^4 int p w
};

inline EnergyBreakdown compute_energies(const Space& space, const State& state,
                                        const PlateProblem& problem) {
  EnergyBreakdown en;
  const QuadratureRule& crule = cell_quadrature();
  detail::CellBasis basis;
  for (int t = 0; t < space.mesh.n_triangles(); ++t) {
    auto vloc = local_coeffs(space, state.v, t);
    auto wloc = local_coeffs(space, state.w, t);
    for (std::size_t q = 0; q < crule.points.size(); ++q) {
      detail::physical_cell_basis(space.maps[t], q, basis);
      double W = crule.weights[q] * space.maps[t].det;
      Mat2 Hv = Mat2::Zero(), Hw = Mat2::Zero();
      Vec2 gw = Vec2::Zero();
      double wval = 0.0;
      for (int i = 0; i < 10; ++i) {
        Hv += vloc[i] * basis.hess[i];
        Hw += wloc[i] * basis.hess[i];
        gw += wloc[i] * basis.grad[i];
        wval += wloc[i] * basis.val[i];
      }
      en.membrane += W * 0.5 * ddot(Hv, Hv);
      en.bending += W * 0.5 * problem.c_nu * ddot(Hw, Hw);
      en.coupling += W * 0.5 * ddot(cof(Hv), gw * gw.transpose());
      if (problem.load)
        en.pressure_work += W * problem.load_coefficient() *
                            problem.load(space.maps[t].to_physical(crule.points[q])) * wval;
    }
  }
  Field vf(space, state.v);
  for (int k = 0; k < problem.disclinations.size(); ++k)
    en.dirac_work += problem.beta * problem.beta * problem.disclinations.angles[k] *
                     evaluate(vf, problem.disclinations.positions[k]);
  return en;
}

/// Percentage errors e_X = 100 (E_X - E_X,exact) / E_X,exact. A percentage is
/// left unset when the reference term vanishes.
struct EnergyErrors {
  std::optional<double> e_b, e_m, e_c;
};

inline EnergyErrors energy_errors(const EnergyBreakdown& computed,
                                  const EnergyBreakdown& exact) {
  EnergyErrors err;
  auto pct = [](double val, double ref) -> std::optional<double> {
    if (ref == 0.0) return std::nullopt;
    return 100.0 * (val - ref) / ref;
  };
  err.e_b = pct(computed.bending, exact.bending);
  err.e_m = pct(computed.membrane, exact.membrane);
  err.e_c = pct(computed.coupling, exact.coupling);
  return err;
}

/// Cellwise quadratic field [w,w] = 2 det(Hess w) (twice the Gaussian
/// curvature) as a view over the deflection, plus its integrals.
struct GaussianCurvature {
  const Field* w = nullptr;
  double integral = 0.0;      // int [w,w]
  double abs_integral = 0.0;  // int |[w,w]|

  double operator()(const Vec2& p) const {
    Mat2 h;
    evaluate(*w, p, nullptr, &h);
    return 2.0 * h.determinant();
  }
};

inline GaussianCurvature gaussian_curvature_field(const Field& w) {
  GaussianCurvature field;
  field.w = &w;
  const Space& space = *w.space;
  const QuadratureRule& crule = cell_quadrature();
  detail::CellBasis basis;
  for (int t = 0; t < space.mesh.n_triangles(); ++t) {
    auto wloc = local_coeffs(space, w.coeffs, t);
    for (std::size_t q = 0; q < crule.points.size(); ++q) {
      detail::physical_cell_basis(space.maps[t], q, basis);
      double W = crule.weights[q] * space.maps[t].det;
      Mat2 Hw = Mat2::Zero();
      for (int i = 0; i < 10; ++i) Hw += wloc[i] * basis.hess[i];
      double k = 2.0 * Hw.determinant();
      field.integral += W * k;
      field.abs_integral += W * std::abs(k);
    }
  }
  return field;
}

/// Radial stress sigma_rr = e_r . cof(Hess v) e_r at a sample point; at the
/// origin the direction defaults to e_1.
inline double radial_stress(const Field& v, const Vec2& p) {
  Mat2 h;
  evaluate(v, p, nullptr, &h);
  Vec2 er = p.norm() > kGeomEps ? Vec2(p / p.norm()) : Vec2(1.0, 0.0);
  return er.dot(cof(h) * er);
}

inline std::vector<double> radial_stress_field(const Field& v,
                                               const std::vector<Vec2>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const Vec2& p : points) out.push_back(radial_stress(v, p));
  return out;
}

/// Uniform samples of a field along the xi_2 = 0 slice. Normalization divides
/// by the maximum absolute value (skipped and flagged for all-zero fields).
struct Profile {
  std::vector<double> abscissae;
  std::vector<double> values;
  double normalization = 1.0;
  bool normalized = false;
};

inline Profile extract_profile(const Field& field, int n_samples = 401,
                               bool normalize = false) {
  if (n_samples < 2) throw ParameterError("extract_profile: n_samples must be >= 2");
  Profile prof;
  prof.abscissae.resize(n_samples);
  prof.values.resize(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    double x = -1.0 + 2.0 * i / (n_samples - 1);
    prof.abscissae[i] = x;
    double value;
    try {
      value = evaluate(field, Vec2(x, 0.0));
    } catch (const LocationError&) {
      value = 0.0;  // outside the polygonal boundary: fields vanish there
    }
    prof.values[i] = value;
  }
  if (normalize) {
    double m = 0.0;
    for (double v : prof.values) m = std::max(m, std::abs(v));
    if (m > 0.0) {
      for (double& v : prof.values) v /= m;
      prof.normalization = m;
      prof.normalized = true;
    }
  }
  return prof;
}

}  // namespace fvk
