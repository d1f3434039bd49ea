#include "igp/mesh.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace igp {

TriMesh build_rect_mesh(std::size_t nx, std::size_t ny, const Rect& rect) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("build_rect_mesh: nx and ny must be >= 1");
  if (!(rect.xmax > rect.xmin) || !(rect.ymax > rect.ymin)) {
    throw std::invalid_argument(fmt::format("build_rect_mesh: degenerate rectangle [{}, {}] x [{}, {}]",
                                            rect.xmin, rect.xmax, rect.ymin, rect.ymax));
  }

  TriMesh m;
  m.rect = rect;
  m.nx = nx;
  m.ny = ny;

  const std::size_t nnx = nx + 1;
  const std::size_t nny = ny + 1;
  const double hx = (rect.xmax - rect.xmin) / static_cast<double>(nx);
  const double hy = (rect.ymax - rect.ymin) / static_cast<double>(ny);

  m.nodes.reserve(nnx * nny);
  m.on_boundary.assign(nnx * nny, false);
  for (std::size_t j = 0; j < nny; ++j) {
    // Pin the last row/column to the exact bound so boundary detection is exact.
    const double y = (j == ny) ? rect.ymax : rect.ymin + static_cast<double>(j) * hy;
    for (std::size_t i = 0; i < nnx; ++i) {
      const double x = (i == nx) ? rect.xmax : rect.xmin + static_cast<double>(i) * hx;
      const std::size_t id = m.nodes.size();
      m.nodes.push_back({x, y});
      if (i == 0 || i == nx || j == 0 || j == ny) {
        m.on_boundary[id] = true;
        m.boundary_nodes.push_back(static_cast<std::uint32_t>(id));
      }
    }
  }

  m.elements.reserve(2 * nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const auto sw = static_cast<std::uint32_t>(j * nnx + i);
      const auto se = sw + 1;
      const auto nw = static_cast<std::uint32_t>(sw + nnx);
      const auto ne = nw + 1;
      m.elements.push_back({sw, se, ne});
      m.elements.push_back({sw, ne, nw});
    }
  }

  for (const auto& t : m.elements) {
    for (int a = 0; a < 3; ++a) {
      const Point& p = m.nodes[t[a]];
      const Point& q = m.nodes[t[(a + 1) % 3]];
      m.h = std::max(m.h, std::hypot(p.x - q.x, p.y - q.y));
    }
  }
  return m;
}

ElementGeometry triangle_geometry(const Point& p0, const Point& p1, const Point& p2) {
  const double twice_area = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
  if (!(twice_area > 0.0)) {
    throw std::invalid_argument("triangle_geometry: non-positive signed area");
  }
  ElementGeometry g;
  g.area = 0.5 * twice_area;
  const double inv = 1.0 / twice_area;
  g.grad[0] = {(p1.y - p2.y) * inv, (p2.x - p1.x) * inv};
  g.grad[1] = {(p2.y - p0.y) * inv, (p0.x - p2.x) * inv};
  g.grad[2] = {(p0.y - p1.y) * inv, (p1.x - p0.x) * inv};
  return g;
}

ElementGeometry element_geometry(const TriMesh& mesh, std::size_t e) {
  if (e >= mesh.elements.size()) {
    throw std::out_of_range(fmt::format("element_geometry: element {} of {}", e, mesh.elements.size()));
  }
  const Triangle& t = mesh.elements[e];
  return triangle_geometry(mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
}

}  // namespace igp
