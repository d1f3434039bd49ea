#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace igp {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double xmin = -1.0;
  double xmax = 1.0;
  double ymin = -1.0;
  double ymax = 1.0;

  double area() const { return (xmax - xmin) * (ymax - ymin); }
  friend bool operator==(const Rect&, const Rect&) = default;
};

using Triangle = std::array<std::uint32_t, 3>;

/// Structured P1 triangulation of an axis-aligned rectangle.
///
/// Nodes are row-major (x fastest). Cell (i, j) produces two
/// counterclockwise triangles split along its SW-NE diagonal:
/// (sw, se, ne) then (sw, ne, nw).
struct TriMesh {
  Rect rect;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<Point> nodes;
  std::vector<Triangle> elements;
  std::vector<std::uint32_t> boundary_nodes;  // sorted ascending
  std::vector<bool> on_boundary;              // per node
  double h = 0.0;                             // max element diameter

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_elements() const { return elements.size(); }
};

TriMesh build_rect_mesh(std::size_t nx, std::size_t ny, const Rect& rect = {});

using Vec2 = std::array<double, 2>;

/// Area and the constant gradients of the three P1 hat functions.
struct ElementGeometry {
  double area = 0.0;
  std::array<Vec2, 3> grad;
};

/// Geometry of the triangle (p0, p1, p2). Signed area must be positive.
ElementGeometry triangle_geometry(const Point& p0, const Point& p1, const Point& p2);

ElementGeometry element_geometry(const TriMesh& mesh, std::size_t e);

}  // namespace igp
