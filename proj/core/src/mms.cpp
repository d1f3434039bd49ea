#include "igp/mms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "igp/fem.hpp"

namespace igp {

namespace detail {
// Dunavant 7-point rule, exact for polynomials of degree 5.
const QuadPoint kDegree5Rule[7] = {
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
    {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
};
}  // namespace detail

std::vector<MmsLevel> run_mms(std::size_t levels, std::size_t base_cells, double mu) {
  if (levels < 1) throw std::invalid_argument("run_mms: need at least one level");
  if (base_cells < 1) throw std::invalid_argument("run_mms: base mesh must have >= 1 cell");
  constexpr double pi = std::numbers::pi;
  auto exact = [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); };
  auto forcing = [&](double x, double y) { return (2.0 * pi * pi + mu) * exact(x, y); };

  std::vector<MmsLevel> out;
  std::size_t cells = base_cells;
  for (std::size_t l = 0; l < levels; ++l, cells *= 2) {
    const TriMesh mesh = build_rect_mesh(cells, cells);
    const CsrMatrix system = CsrMatrix::combine(1.0, assemble_stiffness(mesh), mu, assemble_mass(mesh));

    // Load vector int f phi_i with the same quadrature as the error.
    std::vector<double> load(mesh.num_nodes(), 0.0);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      const Triangle& t = mesh.elements[e];
      const Point& p0 = mesh.nodes[t[0]];
      const Point& p1 = mesh.nodes[t[1]];
      const Point& p2 = mesh.nodes[t[2]];
      const double area = element_geometry(mesh, e).area;
      for (const auto& q : detail::kDegree5Rule) {
        const double f = forcing(q.l0 * p0.x + q.l1 * p1.x + q.l2 * p2.x, q.l0 * p0.y + q.l1 * p1.y + q.l2 * p2.y);
        load[t[0]] += area * q.weight * f * q.l0;
        load[t[1]] += area * q.weight * f * q.l1;
        load[t[2]] += area * q.weight * f * q.l2;
      }
    }

    SolverOptions opts;
    opts.tol = 1e-12;
    SolveResult sol = solve_cg(system, load, opts);
    if (!sol.report.converged) throw std::runtime_error("run_mms: CG did not converge: " + sol.report.message);

    MmsLevel level;
    level.cells = cells;
    level.h = mesh.h;
    level.l2_error = l2_error(mesh, sol.x, exact);
    level.solver = sol.report;
    if (!out.empty()) level.order = std::log2(out.back().l2_error / level.l2_error);
    out.push_back(level);
  }
  return out;
}

}  // namespace igp
