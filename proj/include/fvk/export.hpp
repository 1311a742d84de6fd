#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "fvk/common.hpp"
#include "fvk/mesh.hpp"
#include "fvk/post.hpp"
#include "fvk/space.hpp"

namespace fvk {

/// One CSV table: header row, comma separated, full double precision.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("write_csv: cannot open " + path);
  for (std::size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

/// Named vertex data for VTK export. Discontinuous quantities (curvature,
/// stress) are averaged over the cells incident to each vertex.
struct VertexData {
  std::string name;
  std::vector<double> values;  // one per mesh vertex
};

inline VertexData vertex_data_from_field(const std::string& name, const Field& f) {
  const Space& space = *f.space;
  VertexData data;
  data.name = name;
  data.values.resize(space.mesh.n_vertices());
  for (int v = 0; v < space.mesh.n_vertices(); ++v) {
    int g = space.dofmap.global_to_free[v];  // vertex dofs are the first block
    data.values[v] = g >= 0 ? f.coeffs[g] : 0.0;
  }
  return data;
}

template <typename CellEval>  // double(int cell, const Vec2& ref)
inline VertexData vertex_data_cell_averaged(const std::string& name, const Mesh& mesh,
                                            CellEval&& eval) {
  static const Vec2 refv[3] = {Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
  VertexData data;
  data.name = name;
  data.values.assign(mesh.n_vertices(), 0.0);
  std::vector<int> count(mesh.n_vertices(), 0);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    for (int i = 0; i < 3; ++i) {
      int v = mesh.triangles[t][i];
      data.values[v] += eval(t, refv[i]);
      ++count[v];
    }
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (count[v] > 0) data.values[v] /= count[v];
  return data;
}

/// Legacy ASCII VTK of the triangulation (P1 subsampling: vertices only)
/// with the given point-data arrays.
inline void write_vtk(const Mesh& mesh, const std::vector<VertexData>& data,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("write_vtk: cannot open " + path);
  out << "# vtk DataFile Version 3.0\nplate fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vec2& p : mesh.vertices)
    out << format_double(p.x()) << ' ' << format_double(p.y()) << " 0\n";
  out << "CELLS " << mesh.n_triangles() << ' ' << 4 * mesh.n_triangles() << "\n";
  for (const auto& tri : mesh.triangles)
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << "\n";
  out << "CELL_TYPES " << mesh.n_triangles() << "\n";
  for (int t = 0; t < mesh.n_triangles(); ++t) out << "5\n";
  out << "POINT_DATA " << mesh.n_vertices() << "\n";
  for (const VertexData& d : data) {
    out << "SCALARS " << d.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : d.values) out << format_double(v) << "\n";
  }
}

}  // namespace fvk
