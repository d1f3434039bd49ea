#pragma once

// Convergence study for -Lap u + mu u = f on [-1, 1]^2 with homogeneous
// Neumann data, using u*(x, y) = cos(pi x) cos(pi y).

#include <cmath>
#include <cstddef>
#include <vector>

#include "igp/mesh.hpp"
#include "igp/sparse.hpp"

namespace igp {

struct MmsLevel {
  std::size_t cells = 0;  // per axis
  double h = 0.0;
  double l2_error = 0.0;
  double order = 0.0;  // against the previous level; 0 for the first
  SolverReport solver;
};

/// Solves on meshes base, 2 base, ... (levels of them) and returns the L2
/// error per level, integrated with a degree-5 triangle rule.
std::vector<MmsLevel> run_mms(std::size_t levels, std::size_t base_cells = 16, double mu = 1.0);

namespace detail {
struct QuadPoint {
  double l0, l1, l2, weight;  // barycentric coordinates, weight sums to 1
};
extern const QuadPoint kDegree5Rule[7];
}  // namespace detail

/// L2 norm of (u_h - exact) over the mesh, degree-5 quadrature per element.
template <class F>
double l2_error(const TriMesh& mesh, const std::vector<double>& uh, F&& exact) {
  double sum = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Triangle& t = mesh.elements[e];
    const Point& p0 = mesh.nodes[t[0]];
    const Point& p1 = mesh.nodes[t[1]];
    const Point& p2 = mesh.nodes[t[2]];
    const double area = element_geometry(mesh, e).area;
    double local = 0.0;
    for (const auto& q : detail::kDegree5Rule) {
      const double x = q.l0 * p0.x + q.l1 * p1.x + q.l2 * p2.x;
      const double y = q.l0 * p0.y + q.l1 * p1.y + q.l2 * p2.y;
      const double diff = q.l0 * uh[t[0]] + q.l1 * uh[t[1]] + q.l2 * uh[t[2]] - exact(x, y);
      local += q.weight * diff * diff;
    }
    sum += area * local;
  }
  return std::sqrt(sum);
}

}  // namespace igp
