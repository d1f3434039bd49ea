#include "igp/fem.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

namespace igp {

CsrMatrix p1_pattern(const TriMesh& mesh) {
  const std::size_t n = mesh.num_nodes();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) adj[i].push_back(static_cast<std::uint32_t>(i));
  for (const Triangle& t : mesh.elements) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a != b) adj[t[a]].push_back(t[b]);
      }
    }
  }
  std::vector<std::size_t> ptr(n + 1, 0);
  std::vector<std::uint32_t> idx;
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    idx.insert(idx.end(), row.begin(), row.end());
    ptr[i + 1] = idx.size();
  }
  std::vector<double> val(idx.size(), 0.0);
  return CsrMatrix(n, n, std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix assemble_mass(const TriMesh& mesh) {
  CsrMatrix m = p1_pattern(mesh);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Triangle& t = mesh.elements[e];
    const double s = element_geometry(mesh, e).area / 12.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m.add(t[a], t[b], (a == b ? 2.0 : 1.0) * s);
    }
  }
  return m;
}

std::vector<double> lumped_mass(const TriMesh& mesh) {
  std::vector<double> l(mesh.num_nodes(), 0.0);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const double s = element_geometry(mesh, e).area / 3.0;
    for (std::uint32_t node : mesh.elements[e]) l[node] += s;
  }
  return l;
}

double spatial_mean(const TriMesh& mesh, std::span<const double> f) {
  if (f.size() != mesh.num_nodes()) throw DimensionError("spatial_mean: field size does not match the mesh");
  const std::vector<double> l = lumped_mass(mesh);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += l[i] * f[i];
  return sum / mesh.rect.area();
}

CsrMatrix assemble_stiffness(const TriMesh& mesh, std::span<const double> element_coeff) {
  if (element_coeff.size() != mesh.num_elements()) {
    throw DimensionError(fmt::format("assemble_stiffness: {} coefficients for {} elements", element_coeff.size(),
                                     mesh.num_elements()));
  }
  CsrMatrix k = p1_pattern(mesh);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Triangle& t = mesh.elements[e];
    const ElementGeometry g = element_geometry(mesh, e);
    const double s = element_coeff[e] * g.area;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        k.add(t[a], t[b], s * (g.grad[a][0] * g.grad[b][0] + g.grad[a][1] * g.grad[b][1]));
      }
    }
  }
  return k;
}

CsrMatrix assemble_stiffness(const TriMesh& mesh, double coeff) {
  const std::vector<double> c(mesh.num_elements(), coeff);
  return assemble_stiffness(mesh, c);
}

AssembledOperators assemble_operators(const TriMesh& mesh) {
  AssembledOperators ops;
  ops.mass = assemble_mass(mesh);
  ops.stiffness = assemble_stiffness(mesh);
  ops.lumped = lumped_mass(mesh);
  ops.geometry.reserve(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) ops.geometry.push_back(element_geometry(mesh, e));
  return ops;
}

std::vector<double> assemble_taxis(const TriMesh& mesh, std::span<const ElementGeometry> geometry,
                                   std::span<const double> chi_nodal, std::span<const double> attractant) {
  const std::size_t n = mesh.num_nodes();
  if (geometry.size() != mesh.num_elements() || chi_nodal.size() != n || attractant.size() != n) {
    throw DimensionError("assemble_taxis: field sizes do not match the mesh");
  }
  std::vector<double> r(n, 0.0);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Triangle& t = mesh.elements[e];
    const ElementGeometry& g = geometry[e];
    // Differences against vertex 0 make the gradient of a uniform field exactly zero.
    const double ds1 = attractant[t[1]] - attractant[t[0]];
    const double ds2 = attractant[t[2]] - attractant[t[0]];
    const Vec2 grad_s{ds1 * g.grad[1][0] + ds2 * g.grad[2][0], ds1 * g.grad[1][1] + ds2 * g.grad[2][1]};
    const double chibar = (chi_nodal[t[0]] + chi_nodal[t[1]] + chi_nodal[t[2]]) / 3.0;
    const double s = chibar * g.area;
    const double c1 = s * (grad_s[0] * g.grad[1][0] + grad_s[1] * g.grad[1][1]);
    const double c2 = s * (grad_s[0] * g.grad[2][0] + grad_s[1] * g.grad[2][1]);
    r[t[0]] -= c1 + c2;  // grad phi_0 = -(grad phi_1 + grad phi_2)
    r[t[1]] += c1;
    r[t[2]] += c2;
  }
  return r;
}

std::vector<double> assemble_taxis(const TriMesh& mesh, std::span<const ElementGeometry> geometry,
                                   const Params& p, const FieldState& state) {
  const std::size_t n = mesh.num_nodes();
  if (state.u.size() != n || state.v.size() != n || state.w.size() != n) {
    throw DimensionError("assemble_taxis: state not aligned with mesh");
  }
  std::vector<double> chi(n);
  for (std::size_t i = 0; i < n; ++i) chi[i] = sensitivity(p, state.u[i], state.v[i], state.w[i]);
  const std::vector<double>& s = p.model == Model::ActiveSearch ? state.v : state.u;
  return assemble_taxis(mesh, geometry, chi, s);
}

std::vector<double> assemble_taxis(const TriMesh& mesh, const Params& p, const FieldState& state) {
  std::vector<ElementGeometry> geometry;
  geometry.reserve(mesh.num_elements());
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) geometry.push_back(element_geometry(mesh, e));
  return assemble_taxis(mesh, geometry, p, state);
}

}  // namespace igp
