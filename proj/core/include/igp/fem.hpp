#pragma once

// P1 finite-element operators on a TriMesh with homogeneous Neumann data.
// All element integrals are closed form.

#include <span>
#include <vector>

#include "igp/dynamics.hpp"
#include "igp/mesh.hpp"
#include "igp/sparse.hpp"

namespace igp {

/// Node-adjacency pattern (pairs sharing an element, plus the diagonal)
/// with all values zero.
CsrMatrix p1_pattern(const TriMesh& mesh);

/// M_ij = int phi_i phi_j; element block (area / 12) [[2,1,1],[1,2,1],[1,1,2]].
CsrMatrix assemble_mass(const TriMesh& mesh);

/// Row sums of the consistent mass matrix (area / 3 per element vertex).
std::vector<double> lumped_mass(const TriMesh& mesh);

/// Integral of the P1 interpolant of f divided by the domain area.
double spatial_mean(const TriMesh& mesh, std::span<const double> f);

/// A_ij = sum_e coeff(e) area(e) grad phi_j . grad phi_i.
CsrMatrix assemble_stiffness(const TriMesh& mesh, std::span<const double> element_coeff);
CsrMatrix assemble_stiffness(const TriMesh& mesh, double coeff = 1.0);

struct AssembledOperators {
  CsrMatrix mass;
  CsrMatrix stiffness;
  std::vector<double> lumped;
  std::vector<ElementGeometry> geometry;  // per element, cached
};

AssembledOperators assemble_operators(const TriMesh& mesh);

/// Weak form of -div(chi grad s): r_i = sum_e chibar(e) area(e) grad s_h . grad phi_i,
/// where chibar is the mean of the nodal chi over the element vertices.
/// Adding r to the right-hand side of an equation moves that species up
/// the gradient of s wherever chi > 0. Sum_i r_i vanishes for any input.
std::vector<double> assemble_taxis(const TriMesh& mesh, std::span<const ElementGeometry> geometry,
                                   std::span<const double> chi_nodal, std::span<const double> attractant);

/// Taxis vector for the w-equation of the model selected in p: attractant
/// v with chi1 (active search) or u with chi2 (resource attraction).
std::vector<double> assemble_taxis(const TriMesh& mesh, std::span<const ElementGeometry> geometry,
                                   const Params& p, const FieldState& state);
std::vector<double> assemble_taxis(const TriMesh& mesh, const Params& p, const FieldState& state);

/// Nodal interpolant of f at mesh nodes.
template <class F>
std::vector<double> interpolate(const TriMesh& mesh, F&& f) {
  std::vector<double> out(mesh.num_nodes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(mesh.nodes[i].x, mesh.nodes[i].y);
  return out;
}

}  // namespace igp
