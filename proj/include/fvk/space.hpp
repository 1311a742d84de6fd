#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "fvk/common.hpp"
#include "fvk/element.hpp"
#include "fvk/mesh.hpp"
#include "fvk/quadrature.hpp"

namespace fvk {

/// Global dof numbering for continuous piecewise cubics:
/// [0, V) vertex dofs, [V, V+2E) edge dofs (two per edge, ordered along the
/// edge from the lower to the higher vertex index), [V+2E, V+2E+T) cell dofs.
/// A dof is constrained iff it sits on a boundary vertex or boundary edge,
/// which realizes u = 0 on the triangulated boundary.
struct DofMap {
  int n_total = 0;
  int n_free = 0;
  std::vector<int> cell_dofs;       // 10 entries per cell, P3 local node order
  std::vector<int> global_to_free;  // -1 if constrained
  std::vector<int> free_to_global;
  std::vector<Vec2> dof_position;   // nodal point of each global dof

  int cell_dof(int cell, int local) const { return cell_dofs[10 * cell + local]; }
};

inline DofMap build_dofmap(const Mesh& mesh, bool constrain_boundary = true) {
  DofMap dm;
  const int V = mesh.n_vertices(), E = mesh.n_edges(), T = mesh.n_triangles();
  dm.n_total = V + 2 * E + T;
  dm.cell_dofs.resize(10 * static_cast<std::size_t>(T));
  dm.dof_position.resize(dm.n_total);

  for (int v = 0; v < V; ++v) dm.dof_position[v] = mesh.vertices[v];
  for (int e = 0; e < E; ++e) {
    const Vec2& a = mesh.vertices[mesh.edges[e][0]];
    const Vec2& b = mesh.vertices[mesh.edges[e][1]];
    dm.dof_position[V + 2 * e] = a + (b - a) / 3.0;
    dm.dof_position[V + 2 * e + 1] = a + 2.0 * (b - a) / 3.0;
  }
  for (int t = 0; t < T; ++t) dm.dof_position[V + 2 * E + t] = mesh.centroid(t);

  for (int t = 0; t < T; ++t) {
    const auto& tri = mesh.triangles[t];
    int* dofs = &dm.cell_dofs[10 * t];
    dofs[0] = tri[0];
    dofs[1] = tri[1];
    dofs[2] = tri[2];
    for (int le = 0; le < 3; ++le) {
      int p = tri[le];
      int e = mesh.tri_edges[t][le];
      // Local node 3+2le is a third of the way from p to q.
      bool forward = (p == mesh.edges[e][0]);
      dofs[3 + 2 * le] = V + 2 * e + (forward ? 0 : 1);
      dofs[3 + 2 * le + 1] = V + 2 * e + (forward ? 1 : 0);
    }
    dofs[9] = V + 2 * E + t;
  }

  dm.global_to_free.assign(dm.n_total, -1);
  std::vector<bool> constrained(dm.n_total, false);
  if (constrain_boundary) {
    for (int v = 0; v < V; ++v) constrained[v] = mesh.vertex_on_boundary[v];
    for (int e = 0; e < E; ++e)
      if (mesh.edge_on_boundary[e])
        constrained[V + 2 * e] = constrained[V + 2 * e + 1] = true;
  }
  for (int g = 0; g < dm.n_total; ++g)
    if (!constrained[g]) {
      dm.global_to_free[g] = dm.n_free++;
      dm.free_to_global.push_back(g);
    }
  return dm;
}

/// Mesh plus dof map plus cached affine maps; the context every assembly and
/// evaluation routine works against.
struct Space {
  Mesh mesh;
  DofMap dofmap;
  std::vector<AffineMap> maps;

  explicit Space(Mesh m, bool constrain_boundary = true) : mesh(std::move(m)) {
    dofmap = build_dofmap(mesh, constrain_boundary);
    maps.reserve(mesh.n_triangles());
    for (int t = 0; t < mesh.n_triangles(); ++t) {
      const auto& tri = mesh.triangles[t];
      maps.push_back(AffineMap::from_triangle(
          mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]));
    }
  }

  int n_free() const { return dofmap.n_free; }
};

/// Coefficient vector over the free dofs of a Space.
struct Field {
  const Space* space = nullptr;
  Eigen::VectorXd coeffs;

  Field() = default;
  explicit Field(const Space& s) : space(&s), coeffs(Eigen::VectorXd::Zero(s.n_free())) {}
  Field(const Space& s, Eigen::VectorXd c) : space(&s), coeffs(std::move(c)) {}
};

/// Local coefficients of a cell (constrained dofs contribute zero).
inline Eigen::Matrix<double, 10, 1> local_coeffs(const Space& space,
                                                 const Eigen::VectorXd& coeffs,
                                                 int cell) {
  Eigen::Matrix<double, 10, 1> loc;
  for (int i = 0; i < 10; ++i) {
    int f = space.dofmap.global_to_free[space.dofmap.cell_dof(cell, i)];
    loc[i] = f >= 0 ? coeffs[f] : 0.0;
  }
  return loc;
}

struct PointLocation {
  int cell = -1;
  Vec2 ref;  // reference coordinates in that cell
};

/// Brute-force point location with a barycentric inside test. Points on
/// shared edges resolve to the lowest-index incident cell.
inline PointLocation locate_point(const Mesh& mesh, const std::vector<AffineMap>& maps,
                                  const Vec2& p) {
  int best_cell = -1;
  double best_min = -1e300;
  Vec2 best_ref = Vec2::Zero();
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    Vec2 ref = maps[t].to_reference(p);
    double l0 = 1.0 - ref.x() - ref.y();
    double m = std::min({l0, ref.x(), ref.y()});
    if (m > best_min) {
      best_min = m;
      best_cell = t;
      best_ref = ref;
      if (m >= 0.0) break;  // strictly inside (or on an edge): done
    }
  }
  if (best_min < -kGeomEps)
    throw LocationError("locate_point: point outside triangulated domain");
  return {best_cell, best_ref};
}

inline PointLocation locate_point(const Space& space, const Vec2& p) {
  return locate_point(space.mesh, space.maps, p);
}

/// Value (and optionally gradient / Hessian) of a field at a point.
inline double evaluate(const Field& field, const Vec2& p, Vec2* grad = nullptr,
                       Mat2* hess = nullptr) {
  const Space& space = *field.space;
  PointLocation loc = locate_point(space, p);
  std::array<double, 10> vals;
  std::array<Vec2, 10> grads;
  std::array<Mat2, 10> hessians;
  p3_element().eval(loc.ref, vals, grads, hessians);
  auto coeffs = local_coeffs(space, field.coeffs, loc.cell);
  double value = 0.0;
  if (grad) grad->setZero();
  if (hess) hess->setZero();
  const AffineMap& map = space.maps[loc.cell];
  for (int i = 0; i < 10; ++i) {
    value += coeffs[i] * vals[i];
    if (grad || hess) {
      Vec2 g;
      Mat2 h;
      physical_derivatives(map, grads[i], hessians[i], g, h);
      if (grad) *grad += coeffs[i] * g;
      if (hess) *hess += coeffs[i] * h;
    }
  }
  return value;
}

/// Value of a field at reference coordinates of a known cell.
inline double evaluate_in_cell(const Field& field, int cell, const Vec2& ref,
                               Vec2* grad = nullptr, Mat2* hess = nullptr) {
  const Space& space = *field.space;
  std::array<double, 10> vals;
  std::array<Vec2, 10> grads;
  std::array<Mat2, 10> hessians;
  p3_element().eval(ref, vals, grads, hessians);
  auto coeffs = local_coeffs(space, field.coeffs, cell);
  double value = 0.0;
  if (grad) grad->setZero();
  if (hess) hess->setZero();
  for (int i = 0; i < 10; ++i) {
    value += coeffs[i] * vals[i];
    if (grad || hess) {
      Vec2 g;
      Mat2 h;
      physical_derivatives(space.maps[cell], grads[i], hessians[i], g, h);
      if (grad) *grad += coeffs[i] * g;
      if (hess) *hess += coeffs[i] * h;
    }
  }
  return value;
}

/// Nodal interpolant of a scalar function; constrained dofs are forced to zero.
inline Field interpolate(const Space& space, const std::function<double(const Vec2&)>& f) {
  Field field(space);
  for (int k = 0; k < space.n_free(); ++k)
    field.coeffs[k] = f(space.dofmap.dof_position[space.dofmap.free_to_global[k]]);
  return field;
}

}  // namespace fvk
