#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "fvk/common.hpp"

namespace fvk {

/// Conforming triangulation with the edge topology needed by DG edge loops.
/// Immutable after finalize(); safe for concurrent reads.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise

  // Built by finalize():
  std::vector<std::array<int, 2>> edges;      // vertex pairs (a,b), a < b
  std::vector<std::array<int, 2>> edge_tris;  // (T-, T+); T+ = -1 on boundary
  std::vector<std::array<int, 3>> tri_edges;  // edge ids, local edge i = (v_i, v_{i+1})
  std::vector<double> tri_diameter;
  std::vector<bool> edge_on_boundary;
  std::vector<bool> vertex_on_boundary;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int n_edges() const { return static_cast<int>(edges.size()); }

  double signed_area(int t) const {
    const Vec2& a = vertices[triangles[t][0]];
    const Vec2& b = vertices[triangles[t][1]];
    const Vec2& c = vertices[triangles[t][2]];
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
  }

  Vec2 centroid(int t) const {
    return (vertices[triangles[t][0]] + vertices[triangles[t][1]] +
            vertices[triangles[t][2]]) / 3.0;
  }

  /// Build edge set, adjacency, diameters and boundary flags. Throws if a
  /// triangle is degenerate/clockwise or an edge has more than two triangles.
  void finalize() {
    edges.clear();
    edge_tris.clear();
    tri_edges.assign(triangles.size(), {-1, -1, -1});
    tri_diameter.assign(triangles.size(), 0.0);

    std::map<std::array<int, 2>, std::vector<int>> incident;
    for (int t = 0; t < n_triangles(); ++t) {
      if (signed_area(t) <= 0.0)
        throw GeometryError("Mesh: triangle " + std::to_string(t) +
                            " is degenerate or clockwise");
      const auto& tri = triangles[t];
      for (int i = 0; i < 3; ++i) {
        int a = tri[i], b = tri[(i + 1) % 3];
        incident[{std::min(a, b), std::max(a, b)}].push_back(t);
      }
      double d01 = (vertices[tri[0]] - vertices[tri[1]]).norm();
      double d12 = (vertices[tri[1]] - vertices[tri[2]]).norm();
      double d20 = (vertices[tri[2]] - vertices[tri[0]]).norm();
      tri_diameter[t] = std::max({d01, d12, d20});
    }

    edge_on_boundary.clear();
    std::map<std::array<int, 2>, int> edge_id;
    for (auto& [key, tris] : incident) {  // std::map: deterministic lexicographic order
      if (tris.size() > 2)
        throw GeometryError("Mesh: edge shared by more than two triangles");
      std::sort(tris.begin(), tris.end());  // T- = lower triangle index
      edge_id[key] = n_edges();
      edges.push_back(key);
      edge_tris.push_back({tris[0], tris.size() == 2 ? tris[1] : -1});
      edge_on_boundary.push_back(tris.size() == 1);
    }

    for (int t = 0; t < n_triangles(); ++t) {
      const auto& tri = triangles[t];
      for (int i = 0; i < 3; ++i) {
        int a = tri[i], b = tri[(i + 1) % 3];
        tri_edges[t][i] = edge_id[{std::min(a, b), std::max(a, b)}];
      }
    }

    vertex_on_boundary.assign(vertices.size(), false);
    for (int e = 0; e < n_edges(); ++e)
      if (edge_on_boundary[e]) {
        vertex_on_boundary[edges[e][0]] = true;
        vertex_on_boundary[edges[e][1]] = true;
      }
  }
};

/// Per-edge geometry. For interior edges the normal points from T- into T+;
/// for boundary edges it is the outward normal.
struct EdgeGeometry {
  Vec2 normal;
  Vec2 tangent;
  double length = 0.0;
  Vec2 midpoint;
  double avg_diameter = 0.0;  // {eta}_e
};

inline EdgeGeometry edge_geometry(const Mesh& mesh, int e) {
  if (e < 0 || e >= mesh.n_edges()) throw ParameterError("edge_geometry: bad edge id");
  const Vec2& xa = mesh.vertices[mesh.edges[e][0]];
  const Vec2& xb = mesh.vertices[mesh.edges[e][1]];
  EdgeGeometry g;
  Vec2 d = xb - xa;
  g.length = d.norm();
  g.midpoint = 0.5 * (xa + xb);
  g.normal = Vec2(d.y(), -d.x()) / g.length;
  // Orient away from T- (interior: towards T+; boundary: outward).
  if (g.normal.dot(g.midpoint - mesh.centroid(mesh.edge_tris[e][0])) < 0.0)
    g.normal = -g.normal;
  g.tangent = Vec2(-g.normal.y(), g.normal.x());
  int tm = mesh.edge_tris[e][0], tp = mesh.edge_tris[e][1];
  g.avg_diameter = tp >= 0
                       ? 0.5 * (mesh.tri_diameter[tm] + mesh.tri_diameter[tp])
                       : mesh.tri_diameter[tm];
  return g;
}

/// Interior/boundary partition of the edge set.
inline std::pair<std::vector<int>, std::vector<int>> classify_edges(const Mesh& mesh) {
  std::vector<int> interior, boundary;
  for (int e = 0; e < mesh.n_edges(); ++e)
    (mesh.edge_on_boundary[e] ? boundary : interior).push_back(e);
  return {interior, boundary};
}

/// Structured polar-graded triangulation of the unit disc. Ring k of K sits
/// at radius k/K and carries 6k vertices, so the circumferential and radial
/// spacings match; annuli are zipper-triangulated. The origin is always a
/// vertex and boundary vertices lie exactly on the unit circle.
inline Mesh generate_disc_mesh(double target_h) {
  if (!(target_h > 0.0) || !(target_h < 1.0))
    throw ParameterError("generate_disc_mesh: target_h must be in (0, 1)");
  // Worst zipper diagonal is sqrt(3)/K, so this keeps diameters <= 1.5 h.
  const int K = std::max(2, static_cast<int>(std::ceil(1.16 / target_h)));

  Mesh mesh;
  mesh.vertices.emplace_back(0.0, 0.0);
  std::vector<int> ring_start = {0};  // vertex index of the first point of ring k
  for (int k = 1; k <= K; ++k) {
    ring_start.push_back(mesh.n_vertices());
    const int nk = 6 * k;
    const double r = static_cast<double>(k) / K;
    for (int j = 0; j < nk; ++j) {
      double a = 2.0 * std::numbers::pi * j / nk;
      mesh.vertices.emplace_back(r * std::cos(a), r * std::sin(a));
    }
  }

  // Center fan.
  for (int j = 0; j < 6; ++j)
    mesh.triangles.push_back({0, ring_start[1] + j, ring_start[1] + (j + 1) % 6});

  // Zipper between rings k-1 and k. Angular positions are the fractions
  // i/ni and o/no of a turn; comparing (i+1)*no vs (o+1)*ni keeps the merge
  // exact and deterministic, and ties advance the outer ring first so that
  // radially aligned vertices (e.g. on the x-axis) are joined by an edge.
  for (int k = 2; k <= K; ++k) {
    const int ni = 6 * (k - 1), no = 6 * k;
    const int si = ring_start[k - 1], so = ring_start[k];
    int i = 0, o = 0;
    while (i < ni || o < no) {
      int inner = si + i % ni, inner_next = si + (i + 1) % ni;
      int outer = so + o % no, outer_next = so + (o + 1) % no;
      bool advance_outer =
          o < no && (i >= ni || static_cast<long>(o + 1) * ni <= static_cast<long>(i + 1) * no);
      if (advance_outer) {
        mesh.triangles.push_back({inner, outer, outer_next});
        ++o;
      } else {
        mesh.triangles.push_back({inner, outer, inner_next});
        ++i;
      }
    }
  }

  mesh.finalize();
  return mesh;
}

}  // namespace fvk
