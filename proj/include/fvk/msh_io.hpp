#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fvk/common.hpp"
#include "fvk/mesh.hpp"

namespace fvk {

/// Read an ASCII Gmsh MSH v2.2 file with 2D triangle elements.
/// Point (15) and line (1) elements are skipped as boundary entities; any
/// other element type is rejected. Clockwise triangles are reoriented.
inline Mesh import_msh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("import_msh: cannot open " + path);

  Mesh mesh;
  std::map<long, int> node_index;
  std::string line;
  bool saw_nodes = false, saw_elements = false;

  auto next_line = [&](std::string& out) -> bool {
    while (std::getline(in, out)) {
      if (!out.empty() && out.back() == '\r') out.pop_back();
      if (!out.empty()) return true;
    }
    return false;
  };

  while (next_line(line)) {
    if (line == "$MeshFormat") {
      if (!next_line(line)) throw ParseError("import_msh: truncated $MeshFormat");
      std::istringstream fmt(line);
      double version = 0.0;
      int file_type = -1, data_size = 0;
      fmt >> version >> file_type >> data_size;
      if (!fmt || version < 2.0 || version >= 3.0 || file_type != 0)
        throw ParseError("import_msh: expected ASCII MSH v2.x, got '" + line + "'");
      if (!next_line(line) || line != "$EndMeshFormat")
        throw ParseError("import_msh: missing $EndMeshFormat");
    } else if (line == "$Nodes") {
      if (!next_line(line)) throw ParseError("import_msh: truncated $Nodes");
      long n = std::stol(line);
      for (long i = 0; i < n; ++i) {
        if (!next_line(line)) throw ParseError("import_msh: truncated node list");
        std::istringstream ns(line);
        long id;
        double x, y, z;
        if (!(ns >> id >> x >> y >> z))
          throw ParseError("import_msh: bad node line '" + line + "'");
        if (std::abs(z) > kGeomEps)
          throw ParseError("import_msh: nonzero third coordinate on node " +
                           std::to_string(id));
        node_index[id] = mesh.n_vertices();
        mesh.vertices.emplace_back(x, y);
      }
      if (!next_line(line) || line != "$EndNodes")
        throw ParseError("import_msh: missing $EndNodes");
      saw_nodes = true;
    } else if (line == "$Elements") {
      if (!next_line(line)) throw ParseError("import_msh: truncated $Elements");
      long n = std::stol(line);
      for (long i = 0; i < n; ++i) {
        if (!next_line(line)) throw ParseError("import_msh: truncated element list");
        std::istringstream es(line);
        long id;
        int type = 0, ntags = 0;
        if (!(es >> id >> type >> ntags))
          throw ParseError("import_msh: bad element line '" + line + "'");
        for (int t = 0; t < ntags; ++t) {
          long tag;
          if (!(es >> tag)) throw ParseError("import_msh: bad element tags");
        }
        if (type == 15 || type == 1) continue;  // boundary points / lines
        if (type != 2)
          throw ParseError("import_msh: unsupported element type " +
                           std::to_string(type) + " (only 3-node triangles)");
        long a, b, c;
        if (!(es >> a >> b >> c)) throw ParseError("import_msh: bad triangle nodes");
        auto look = [&](long nid) {
          auto it = node_index.find(nid);
          if (it == node_index.end())
            throw ParseError("import_msh: element references unknown node " +
                             std::to_string(nid));
          return it->second;
        };
        mesh.triangles.push_back({look(a), look(b), look(c)});
      }
      if (!next_line(line) || line != "$EndElements")
        throw ParseError("import_msh: missing $EndElements");
      saw_elements = true;
    }
    // Other sections ($PhysicalNames, ...) are skipped up to their terminator.
  }
  if (!saw_nodes || !saw_elements)
    throw ParseError("import_msh: missing $Nodes or $Elements section");

  for (auto& tri : mesh.triangles) {
    const Vec2& a = mesh.vertices[tri[0]];
    const Vec2& b = mesh.vertices[tri[1]];
    const Vec2& c = mesh.vertices[tri[2]];
    double area2 = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    if (area2 < 0.0) std::swap(tri[1], tri[2]);
  }

  mesh.finalize();
  return mesh;
}

/// Write a Mesh as ASCII Gmsh MSH v2.2 ($Nodes/$Elements, type 2 triangles).
inline void export_msh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("export_msh: cannot open " + path);
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$Nodes\n" << mesh.n_vertices() << "\n";
  char buf[80];
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    std::snprintf(buf, sizeof buf, "%d %.17g %.17g 0\n", i + 1,
                  mesh.vertices[i].x(), mesh.vertices[i].y());
    out << buf;
  }
  out << "$EndNodes\n$Elements\n" << mesh.n_triangles() << "\n";
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    out << (t + 1) << " 2 2 0 1 " << (tri[0] + 1) << ' ' << (tri[1] + 1) << ' '
        << (tri[2] + 1) << "\n";
  }
  out << "$EndElements\n";
}

}  // namespace fvk
