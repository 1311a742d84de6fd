#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fvk/common.hpp"
#include "fvk/element.hpp"
#include "fvk/mesh.hpp"
#include "fvk/quadrature.hpp"
#include "fvk/space.hpp"

namespace fvk {

/// Formulation variant: VAR keeps the coupling in cofactor form (cell) and
/// tangential-gradient form (edges) and is the exact gradient of the discrete
/// functional; BNRS17 moves the cell coupling to bracket form and the edge
/// coupling to jump form; CMN18 is BNRS17 without the edge coupling terms.
enum class Variant { VAR, BNRS17, CMN18 };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::VAR: return "var";
    case Variant::BNRS17: return "bnrs17";
    case Variant::CMN18: return "cmn18";
  }
  return "?";
}

inline Variant parse_variant(const std::string& s) {
  if (s == "var" || s == "VAR") return Variant::VAR;
  if (s == "bnrs17" || s == "BNRS17") return Variant::BNRS17;
  if (s == "cmn18" || s == "CMN18") return Variant::CMN18;
  throw ParameterError("unknown variant '" + s + "' (expected var|bnrs17|cmn18)");
}

/// Wedge disclinations: Dirac sources s_i delta(xi - y_i) in the Airy equation.
struct DisclinationSet {
  std::vector<Vec2> positions;
  std::vector<double> angles;  // Frank angles, nonzero

  int size() const { return static_cast<int>(positions.size()); }

  void check() const {
    if (positions.size() != angles.size())
      throw ParameterError("DisclinationSet: positions/angles size mismatch");
    for (std::size_t i = 0; i < positions.size(); ++i) {
      if (positions[i].norm() >= 1.0)
        throw ParameterError("DisclinationSet: position not strictly inside unit disc");
      if (angles[i] == 0.0) throw ParameterError("DisclinationSet: zero Frank angle");
    }
  }
};

using LoadFunction = std::function<double(const Vec2&)>;

/// Non-dimensional plate problem: parameters, transverse load and sources.
struct PlateProblem {
  double beta = 100.0;   // aspect ratio R/h
  double gamma = 0.0;    // load-to-stiffness ratio p0/E
  double nu = 0.15;      // Poisson ratio
  double c_nu = 0.0;     // 1/(12(1-nu^2)), kept consistent with nu
  double alpha = 300.0;  // interior penalty
  Variant variant = Variant::VAR;
  LoadFunction load;     // p(xi); empty means p = 0
  DisclinationSet disclinations;

  PlateProblem() { c_nu = 1.0 / (12.0 * (1.0 - nu * nu)); }
  PlateProblem(double beta_, double gamma_, double nu_, double alpha_ = 300.0,
               Variant variant_ = Variant::VAR)
      : beta(beta_), gamma(gamma_), nu(nu_), alpha(alpha_), variant(variant_) {
    c_nu = 1.0 / (12.0 * (1.0 - nu * nu));
    check();
  }

  void check() const {
    if (!(beta > 0.0)) throw ParameterError("PlateProblem: beta must be positive");
    if (!(alpha > 0.0)) throw ParameterError("PlateProblem: alpha must be positive");
    if (!(nu > -1.0 && nu < 0.5)) throw ParameterError("PlateProblem: nu outside (-1, 1/2)");
    if (std::abs(c_nu - 1.0 / (12.0 * (1.0 - nu * nu))) > 1e-14)
      throw ParameterError("PlateProblem: c_nu inconsistent with nu");
    disclinations.check();
  }

  double load_coefficient() const { return gamma * beta * beta * beta * beta; }
};

/// Discrete state (v, w) over the free dofs of one Space.
struct State {
  Eigen::VectorXd v, w;

  static State zero(const Space& space) {
    return {Eigen::VectorXd::Zero(space.n_free()), Eigen::VectorXd::Zero(space.n_free())};
  }
  Eigen::VectorXd stacked() const {
    Eigen::VectorXd x(v.size() + w.size());
    x << v, w;
    return x;
  }
  static State from_stacked(const Eigen::VectorXd& x) {
    int n = static_cast<int>(x.size()) / 2;
    return {x.head(n), x.tail(n)};
  }
};

/// Block residual [R_v; R_w] and block Jacobian over the free dofs.
struct AssembledSystem {
  Eigen::VectorXd residual;
  Eigen::SparseMatrix<double> jacobian;
};

namespace detail {

// Reference-element tables at the cell quadrature points.
struct CellTables {
  std::vector<std::array<double, 10>> vals;
  std::vector<std::array<Vec2, 10>> grads;
  std::vector<std::array<Mat2, 10>> hess;

  explicit CellTables(const QuadratureRule& rule) {
    vals.resize(rule.points.size());
    grads.resize(rule.points.size());
    hess.resize(rule.points.size());
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      p3_element().eval(rule.points[q], vals[q], grads[q], hess[q]);
  }
};

inline const CellTables& cell_tables() {
  static const CellTables tables(cell_quadrature());
  return tables;
}

// Physical basis data of one cell at one quadrature point.
struct CellBasis {
  std::array<double, 10> val;
  std::array<Vec2, 10> grad;
  std::array<Mat2, 10> hess;
};

inline void physical_cell_basis(const AffineMap& map, std::size_t q, CellBasis& out) {
  const CellTables& t = cell_tables();
  out.val = t.vals[q];
  for (int i = 0; i < 10; ++i)
    physical_derivatives(map, t.grads[q][i], t.hess[q][i], out.grad[i], out.hess[i]);
}

// Basis data of one side of an edge at the edge quadrature points.
struct EdgeSide {
  int cell = -1;
  double sigma = 1.0;  // +1 if this side is T+, -1 if T- (jump orientation)
  // [quad][dof]
  std::vector<std::array<double, 10>> val;
  std::vector<std::array<Vec2, 10>> grad;
  std::vector<std::array<Mat2, 10>> hess;
};

inline void build_edge_side(const Space& space, int edge, int cell, double sigma,
                            EdgeSide& side) {
  const Mesh& mesh = space.mesh;
  const QuadratureRule& rule = edge_quadrature();
  side.cell = cell;
  side.sigma = sigma;
  int a = mesh.edges[edge][0], b = mesh.edges[edge][1];
  static const Vec2 refv[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  int la = -1, lb = -1;
  for (int i = 0; i < 3; ++i) {
    if (mesh.triangles[cell][i] == a) la = i;
    if (mesh.triangles[cell][i] == b) lb = i;
  }
  if (la < 0 || lb < 0) throw GeometryError("build_edge_side: edge not on cell");
  std::size_t nq = rule.points.size();
  side.val.resize(nq);
  side.grad.resize(nq);
  side.hess.resize(nq);
  std::array<double, 10> vals;
  std::array<Vec2, 10> grads;
  std::array<Mat2, 10> hessians;
  for (std::size_t q = 0; q < nq; ++q) {
    double s = rule.points[q].x();
    Vec2 ref = refv[la] * (1.0 - s) + refv[lb] * s;
    p3_element().eval(ref, vals, grads, hessians);
    side.val[q] = vals;
    for (int i = 0; i < 10; ++i)
      physical_derivatives(space.maps[cell], grads[i], hessians[i], side.grad[q][i],
                           side.hess[q][i]);
  }
}

// Accumulators that tolerate being disabled (null targets).
struct Targets {
  Eigen::VectorXd* residual = nullptr;                 // size 2n
  std::vector<Eigen::Triplet<double>>* triplets = nullptr;  // 2n x 2n
  double* energy = nullptr;
  int n = 0;  // free dofs per field
};

}  // namespace detail

/// Symmetric C0 interior penalty bilinear form of the biharmonic operator:
///   A(u,p) = sum_T (Hu : Hp) - sum_e ([du.n]{Hp nn} + [dp.n]{Hu nn})
///            + sum_e (alpha/{eta}) [du.n][dp.n],
/// over all edges including boundary. Positive definite on the free dofs for
/// sufficiently large alpha.
inline Eigen::SparseMatrix<double> assemble_biharmonic_dg(const Space& space,
                                                          double alpha) {
  const Mesh& mesh = space.mesh;
  const DofMap& dm = space.dofmap;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.n_triangles()) * 100 +
               static_cast<std::size_t>(mesh.n_edges()) * 400);

  const QuadratureRule& crule = cell_quadrature();
  detail::CellBasis basis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    for (std::size_t q = 0; q < crule.points.size(); ++q) {
      detail::physical_cell_basis(space.maps[t], q, basis);
      double W = crule.weights[q] * space.maps[t].det;
      for (int i = 0; i < 10; ++i) {
        int fi = dm.global_to_free[dm.cell_dof(t, i)];
        if (fi < 0) continue;
        for (int j = 0; j < 10; ++j) {
          int fj = dm.global_to_free[dm.cell_dof(t, j)];
          if (fj < 0) continue;
          trip.emplace_back(fi, fj, W * ddot(basis.hess[i], basis.hess[j]));
        }
      }
    }
  }

  const QuadratureRule& erule = edge_quadrature();
  for (int e = 0; e < mesh.n_edges(); ++e) {
    EdgeGeometry geo = edge_geometry(mesh, e);
    bool interior = !mesh.edge_on_boundary[e];
    double kappa = interior ? 0.5 : 1.0;
    std::array<detail::EdgeSide, 2> sides;
    int ns = interior ? 2 : 1;
    detail::build_edge_side(space, e, mesh.edge_tris[e][0], interior ? -1.0 : 1.0,
                            sides[0]);
    if (interior) detail::build_edge_side(space, e, mesh.edge_tris[e][1], 1.0, sides[1]);

    for (std::size_t q = 0; q < erule.points.size(); ++q) {
      double W = erule.weights[q] * geo.length;
      double pen = alpha / geo.avg_diameter;
      // Per-dof jump and average coefficients.
      std::array<std::array<double, 10>, 2> jn, av;
      for (int s = 0; s < ns; ++s)
        for (int i = 0; i < 10; ++i) {
          jn[s][i] = sides[s].sigma * sides[s].grad[q][i].dot(geo.normal);
          av[s][i] = kappa * geo.normal.dot(sides[s].hess[q][i] * geo.normal);
        }
      for (int si = 0; si < ns; ++si)
        for (int i = 0; i < 10; ++i) {
          int fi = dm.global_to_free[dm.cell_dof(sides[si].cell, i)];
          if (fi < 0) continue;
          for (int sj = 0; sj < ns; ++sj)
            for (int j = 0; j < 10; ++j) {
              int fj = dm.global_to_free[dm.cell_dof(sides[sj].cell, j)];
              if (fj < 0) continue;
              double value = -(jn[sj][j] * av[si][i] + jn[si][i] * av[sj][j]) +
                             pen * jn[si][i] * jn[sj][j];
              trip.emplace_back(fi, fj, W * value);
            }
        }
    }
  }

  Eigen::SparseMatrix<double> A(dm.n_free, dm.n_free);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

/// Dirac source vector: entries beta^2 sum_i s_i phi_j(y_i) over free dofs.
inline Eigen::VectorXd assemble_dirac_load(const Space& space,
                                           const DisclinationSet& disclinations,
                                           double beta) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.n_free());
  std::array<double, 10> vals;
  std::array<Vec2, 10> grads;
  std::array<Mat2, 10> hessians;
  for (int k = 0; k < disclinations.size(); ++k) {
    PointLocation loc = locate_point(space, disclinations.positions[k]);
    p3_element().eval(loc.ref, vals, grads, hessians);
    for (int i = 0; i < 10; ++i) {
      int f = space.dofmap.global_to_free[space.dofmap.cell_dof(loc.cell, i)];
      if (f >= 0) load[f] += beta * beta * disclinations.angles[k] * vals[i];
    }
  }
  return load;
}

/// Pressure load vector: entries gamma beta^4 int phi_j p.
inline Eigen::VectorXd assemble_pressure_load(const Space& space, const LoadFunction& p,
                                              double gamma, double beta) {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.n_free());
  if (!p) return load;
  double coeff = gamma * beta * beta * beta * beta;
  const QuadratureRule& crule = cell_quadrature();
  const detail::CellTables& tables = detail::cell_tables();
  for (int t = 0; t < space.mesh.n_triangles(); ++t) {
    for (std::size_t q = 0; q < crule.points.size(); ++q) {
      Vec2 x = space.maps[t].to_physical(crule.points[q]);
      double W = crule.weights[q] * space.maps[t].det * coeff * p(x);
      for (int i = 0; i < 10; ++i) {
        int f = space.dofmap.global_to_free[space.dofmap.cell_dof(t, i)];
        if (f >= 0) load[f] += W * tables.vals[q][i];
      }
    }
  }
  return load;
}

namespace detail {

// Shared cell/edge loops for residual, Jacobian and functional assembly.
// The residual is the exact first variation of the discrete functional for
// the VAR variant; BNRS17/CMN18 swap the marked coupling terms.
inline void assemble_core(const Space& space, const State& state,
                          const PlateProblem& problem, Targets tg) {
  const Mesh& mesh = space.mesh;
  const DofMap& dm = space.dofmap;
  const int n = dm.n_free;
  tg.n = n;
  const double c_nu = problem.c_nu;
  const double fcoef = problem.load_coefficient();
  const Variant variant = problem.variant;
  const bool var = variant == Variant::VAR;

  auto free_dof = [&](int cell, int i) { return dm.global_to_free[dm.cell_dof(cell, i)]; };

  // ---- cells ----
  const QuadratureRule& crule = cell_quadrature();
  CellBasis basis;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    auto vloc = local_coeffs(space, state.v, t);
    auto wloc = local_coeffs(space, state.w, t);
    for (std::size_t q = 0; q < crule.points.size(); ++q) {
      physical_cell_basis(space.maps[t], q, basis);
      double W = crule.weights[q] * space.maps[t].det;
      Mat2 Hv = Mat2::Zero(), Hw = Mat2::Zero();
      Vec2 gw = Vec2::Zero();
      double wval = 0.0, vval = 0.0;
      for (int i = 0; i < 10; ++i) {
        Hv += vloc[i] * basis.hess[i];
        Hw += wloc[i] * basis.hess[i];
        gw += wloc[i] * basis.grad[i];
        wval += wloc[i] * basis.val[i];
        vval += vloc[i] * basis.val[i];
      }
      double pval = problem.load ? problem.load(space.maps[t].to_physical(crule.points[q]))
                                 : 0.0;
      Mat2 cofHv = cof(Hv), cofHw = cof(Hw);
      Mat2 gwgw = gw * gw.transpose();

      if (tg.energy) {
        *tg.energy += W * (-0.5 * ddot(Hv, Hv) + 0.5 * ddot(cofHv, gwgw) +
                           0.5 * c_nu * ddot(Hw, Hw) - fcoef * pval * wval);
      }
      if (tg.residual) {
        for (int i = 0; i < 10; ++i) {
          int fi = free_dof(t, i);
          if (fi < 0) continue;
          double rv = -ddot(Hv, basis.hess[i]);
          double rw = c_nu * ddot(Hw, basis.hess[i]) - fcoef * pval * basis.val[i];
          if (var) {
            rv += 0.5 * ddot(cof(basis.hess[i]), gwgw);
            rw += ddot(cofHv, gw * basis.grad[i].transpose());
          } else {
            rv += -0.5 * ddot(cofHw, Hw) * basis.val[i];
            rw += -ddot(cofHv, Hw) * basis.val[i];
          }
          (*tg.residual)[fi] += W * rv;
          (*tg.residual)[n + fi] += W * rw;
        }
      }
      if (tg.triplets) {
        for (int i = 0; i < 10; ++i) {
          int fi = free_dof(t, i);
          if (fi < 0) continue;
          for (int j = 0; j < 10; ++j) {
            int fj = free_dof(t, j);
            if (fj < 0) continue;
            double jvv = -ddot(basis.hess[i], basis.hess[j]);
            double jww = c_nu * ddot(basis.hess[i], basis.hess[j]);
            double jvw, jwv;
            if (var) {
              jvw = ddot(cof(basis.hess[i]), gw * basis.grad[j].transpose());
              jwv = ddot(cof(basis.hess[j]), gw * basis.grad[i].transpose());
              jww += ddot(cofHv, basis.grad[i] * basis.grad[j].transpose());
            } else {
              jvw = -ddot(cofHw, basis.hess[j]) * basis.val[i];
              jwv = -ddot(cof(basis.hess[j]), Hw) * basis.val[i];
              jww += -ddot(cofHv, basis.hess[j]) * basis.val[i];
            }
            tg.triplets->emplace_back(fi, fj, W * jvv);
            tg.triplets->emplace_back(fi, n + fj, W * jvw);
            tg.triplets->emplace_back(n + fi, fj, W * jwv);
            tg.triplets->emplace_back(n + fi, n + fj, W * jww);
          }
        }
      }
    }
  }

  // ---- Dirac sources (enter the v-equation and the functional) ----
  if (tg.residual || tg.energy) {
    std::array<double, 10> vals;
    std::array<Vec2, 10> grads;
    std::array<Mat2, 10> hessians;
    for (int k = 0; k < problem.disclinations.size(); ++k) {
      PointLocation loc = locate_point(space, problem.disclinations.positions[k]);
      p3_element().eval(loc.ref, vals, grads, hessians);
      double b2s = problem.beta * problem.beta * problem.disclinations.angles[k];
      for (int i = 0; i < 10; ++i) {
        int fi = free_dof(loc.cell, i);
        if (fi < 0) continue;
        if (tg.residual) (*tg.residual)[fi] += b2s * vals[i];
        if (tg.energy) *tg.energy += b2s * vals[i] * state.v[fi];
      }
    }
  }

  // ---- edges ----
  const QuadratureRule& erule = edge_quadrature();
  const std::size_t nq = erule.points.size();
  std::array<EdgeSide, 2> sides;
  for (int e = 0; e < mesh.n_edges(); ++e) {
    EdgeGeometry geo = edge_geometry(mesh, e);
    const bool interior = !mesh.edge_on_boundary[e];
    const double kappa = interior ? 0.5 : 1.0;
    const int ns = interior ? 2 : 1;
    build_edge_side(space, e, mesh.edge_tris[e][0], interior ? -1.0 : 1.0, sides[0]);
    if (interior) build_edge_side(space, e, mesh.edge_tris[e][1], 1.0, sides[1]);

    std::array<Eigen::Matrix<double, 10, 1>, 2> vloc, wloc;
    for (int s = 0; s < ns; ++s) {
      vloc[s] = local_coeffs(space, state.v, sides[s].cell);
      wloc[s] = local_coeffs(space, state.w, sides[s].cell);
    }

    const double pen = problem.alpha / geo.avg_diameter;
    for (std::size_t q = 0; q < nq; ++q) {
      const double W = erule.weights[q] * geo.length;

      // Per-dof jump/average/trace/tangential coefficients.
      std::array<std::array<double, 10>, 2> jn, av, tgd;
      // Field traces per side.
      double jnv = 0, jnw = 0, avv = 0, avw = 0;
      std::array<double, 2> twg{0, 0};  // tangential derivative of w per side
      std::array<Vec2, 2> gv, gw;
      std::array<Mat2, 2> Hv, Hw;
      for (int s = 0; s < ns; ++s) {
        gv[s].setZero();
        gw[s].setZero();
        Hv[s].setZero();
        Hw[s].setZero();
        for (int i = 0; i < 10; ++i) {
          jn[s][i] = sides[s].sigma * sides[s].grad[q][i].dot(geo.normal);
          av[s][i] = kappa * geo.normal.dot(sides[s].hess[q][i] * geo.normal);
          tgd[s][i] = sides[s].grad[q][i].dot(geo.tangent);
          gv[s] += vloc[s][i] * sides[s].grad[q][i];
          gw[s] += wloc[s][i] * sides[s].grad[q][i];
          Hv[s] += vloc[s][i] * sides[s].hess[q][i];
          Hw[s] += wloc[s][i] * sides[s].hess[q][i];
          jnv += jn[s][i] * vloc[s][i];
          jnw += jn[s][i] * wloc[s][i];
          avv += av[s][i] * vloc[s][i];
          avw += av[s][i] * wloc[s][i];
        }
        twg[s] = gw[s].dot(geo.tangent);
      }

      if (tg.energy) {
        // c_nu L1(w) + L2(w) - L1(v) - L2(v), L1(u) = -sum_e [du.n]{Hu nn}.
        *tg.energy += W * (c_nu * (-jnw * avw) + 0.5 * pen * jnw * jnw +
                           jnv * avv - 0.5 * pen * jnv * jnv);
        if (interior) {
          double avg_tw2 = 0.5 * (twg[0] * twg[0] + twg[1] * twg[1]);
          *tg.energy += W * (-0.5 * avg_tw2 * jnv);
        }
      }

      // Linear (biharmonic) edge terms of residual and Jacobian.
      if (tg.residual) {
        for (int s = 0; s < ns; ++s)
          for (int i = 0; i < 10; ++i) {
            int fi = free_dof(sides[s].cell, i);
            if (fi < 0) continue;
            (*tg.residual)[fi] +=
                W * (jnv * av[s][i] + jn[s][i] * avv - pen * jn[s][i] * jnv);
            (*tg.residual)[n + fi] +=
                W * (-c_nu * (jnw * av[s][i] + jn[s][i] * avw) + pen * jn[s][i] * jnw);
          }
      }
      if (tg.triplets) {
        for (int si = 0; si < ns; ++si)
          for (int i = 0; i < 10; ++i) {
            int fi = free_dof(sides[si].cell, i);
            if (fi < 0) continue;
            for (int sj = 0; sj < ns; ++sj)
              for (int j = 0; j < 10; ++j) {
                int fj = free_dof(sides[sj].cell, j);
                if (fj < 0) continue;
                double consist = jn[sj][j] * av[si][i] + jn[si][i] * av[sj][j];
                double penal = pen * jn[si][i] * jn[sj][j];
                tg.triplets->emplace_back(fi, fj, W * (consist - penal));
                tg.triplets->emplace_back(n + fi, n + fj,
                                          W * (-c_nu * consist + penal));
              }
          }
      }

      // Nonlinear edge coupling (interior edges only).
      if (!interior) continue;
      if (variant == Variant::VAR) {
        double avg_tw2 = 0.5 * (twg[0] * twg[0] + twg[1] * twg[1]);
        if (tg.residual) {
          for (int s = 0; s < 2; ++s)
            for (int i = 0; i < 10; ++i) {
              int fi = free_dof(sides[s].cell, i);
              if (fi < 0) continue;
              (*tg.residual)[fi] += W * (-0.5 * avg_tw2 * jn[s][i]);
              (*tg.residual)[n + fi] += W * (-0.5 * twg[s] * tgd[s][i] * jnv);
            }
        }
        if (tg.triplets) {
          for (int si = 0; si < 2; ++si)
            for (int i = 0; i < 10; ++i) {
              int fi = free_dof(sides[si].cell, i);
              if (fi < 0) continue;
              for (int sj = 0; sj < 2; ++sj)
                for (int j = 0; j < 10; ++j) {
                  int fj = free_dof(sides[sj].cell, j);
                  if (fj < 0) continue;
                  // d/dw of -1/2 {(dtw)^2}[dphi.n]
                  tg.triplets->emplace_back(
                      fi, n + fj, W * (-0.5 * twg[sj] * tgd[sj][j] * jn[si][i]));
                  // d/dv of -{(dtw)(dtphi)}[dv.n]
                  tg.triplets->emplace_back(
                      n + fi, fj, W * (-0.5 * twg[si] * tgd[si][i] * jn[sj][j]));
                  // d/dw of the same, acts on matching side only
                  if (si == sj)
                    tg.triplets->emplace_back(
                        n + fi, n + fj, W * (-0.5 * tgd[si][i] * tgd[si][j] * jnv));
                }
            }
        }
      } else if (variant == Variant::BNRS17) {
        Mat2 Mv = 0.5 * (cof(Hv[0]) + cof(Hv[1]));
        Mat2 Mw = 0.5 * (cof(Hw[0]) + cof(Hw[1]));
        Vec2 jump_gw = gw[1] - gw[0];
        Vec2 jump_gv = gv[1] - gv[0];
        double jump_ww = (Mw * jump_gw).dot(geo.normal);  // [{cof Hw} dw . n]
        double jump_vw = (Mv * jump_gw).dot(geo.normal);  // [{cof Hv} dw . n]
        double jump_wv = (Mw * jump_gv).dot(geo.normal);  // [{cof Hw} dv . n]
        if (tg.residual) {
          for (int s = 0; s < 2; ++s)
            for (int i = 0; i < 10; ++i) {
              int fi = free_dof(sides[s].cell, i);
              if (fi < 0) continue;
              double tr = 0.5 * sides[s].val[q][i];  // single-valued trace, split
              (*tg.residual)[fi] += W * (0.5 * jump_ww * tr);
              (*tg.residual)[n + fi] += W * (0.5 * (jump_vw + jump_wv) * tr);
            }
        }
        if (tg.triplets) {
          for (int si = 0; si < 2; ++si)
            for (int i = 0; i < 10; ++i) {
              int fi = free_dof(sides[si].cell, i);
              if (fi < 0) continue;
              double tr = 0.5 * sides[si].val[q][i];
              for (int sj = 0; sj < 2; ++sj)
                for (int j = 0; j < 10; ++j) {
                  int fj = free_dof(sides[sj].cell, j);
                  if (fj < 0) continue;
                  double sgn = sides[sj].sigma;
                  Mat2 cofHj = cof(sides[sj].hess[q][j]);
                  // d jump_ww / dw_j
                  double d_ww = (0.5 * cofHj * jump_gw).dot(geo.normal) +
                                sgn * (Mw * sides[sj].grad[q][j]).dot(geo.normal);
                  // d jump_vw / dv_j and /dw_j
                  double d_vw_v = (0.5 * cofHj * jump_gw).dot(geo.normal);
                  double d_vw_w = sgn * (Mv * sides[sj].grad[q][j]).dot(geo.normal);
                  // d jump_wv / dv_j and /dw_j
                  double d_wv_v = sgn * (Mw * sides[sj].grad[q][j]).dot(geo.normal);
                  double d_wv_w = (0.5 * cofHj * jump_gv).dot(geo.normal);
                  tg.triplets->emplace_back(fi, n + fj, W * 0.5 * d_ww * tr);
                  tg.triplets->emplace_back(n + fi, fj,
                                            W * 0.5 * (d_vw_v + d_wv_v) * tr);
                  tg.triplets->emplace_back(n + fi, n + fj,
                                            W * 0.5 * (d_vw_w + d_wv_w) * tr);
                }
            }
        }
      }
      // CMN18: no edge coupling terms.
    }
  }
}

}  // namespace detail

/// Residual [R_v; R_w]: the discrete weak equations tested against every free
/// basis function. For VAR this is the exact gradient of the functional.
inline Eigen::VectorXd assemble_residual(const Space& space, const State& state,
                                         const PlateProblem& problem) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(2 * space.n_free());
  detail::Targets tg;
  tg.residual = &r;
  detail::assemble_core(space, state, problem, tg);
  return r;
}

/// Exact block Jacobian of the residual at the given state.
inline Eigen::SparseMatrix<double> assemble_jacobian(const Space& space,
                                                     const State& state,
                                                     const PlateProblem& problem) {
  std::vector<Eigen::Triplet<double>> trip;
  const Mesh& mesh = space.mesh;
  trip.reserve(static_cast<std::size_t>(mesh.n_triangles()) * 400 +
               static_cast<std::size_t>(mesh.n_edges()) * 1200);
  detail::Targets tg;
  tg.triplets = &trip;
  detail::assemble_core(space, state, problem, tg);
  Eigen::SparseMatrix<double> J(2 * space.n_free(), 2 * space.n_free());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

inline AssembledSystem assemble_system(const Space& space, const State& state,
                                       const PlateProblem& problem) {
  AssembledSystem sys;
  sys.residual = Eigen::VectorXd::Zero(2 * space.n_free());
  std::vector<Eigen::Triplet<double>> trip;
  detail::Targets tg;
  tg.residual = &sys.residual;
  tg.triplets = &trip;
  detail::assemble_core(space, state, problem, tg);
  sys.jacobian.resize(2 * space.n_free(), 2 * space.n_free());
  sys.jacobian.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

/// Value of the discrete functional I_eta at a state (the VAR potential).
inline double evaluate_functional(const Space& space, const State& state,
                                  const PlateProblem& problem) {
  double energy = 0.0;
  detail::Targets tg;
  tg.energy = &energy;
  detail::assemble_core(space, state, problem, tg);
  return energy;
}

}  // namespace fvk
