#include "igp/sparse.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "igp/fem.hpp"
#include "igp/mesh.hpp"
#include "test_support.hpp"

namespace igp {
namespace {

using test::dense_matvec;
using test::dense_solve;
using test::max_abs_diff;
using test::random_vector;
using test::to_dense;

CsrMatrix small() {
  // [4 1 0; 1 3 -1; 0 -1 2]
  return CsrMatrix::from_triplets(3, 3, {{0, 0, 4}, {0, 1, 1}, {1, 0, 1}, {1, 1, 3}, {1, 2, -1}, {2, 1, -1}, {2, 2, 2}});
}

TEST(Csr, TripletsSumDuplicatesAndSortColumns) {
  const CsrMatrix a = CsrMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {0, 1, 0.5}});
  EXPECT_EQ(a.nnz(), 3u);
  EXPECT_DOUBLE_EQ(a(0, 1), 2.5);
  EXPECT_DOUBLE_EQ(a(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(a(1, 2), 1.0);
  EXPECT_DOUBLE_EQ(a(0, 0), 0.0);
  EXPECT_EQ(a.find(0, 0), CsrMatrix::npos);
  EXPECT_EQ(a.col_idx()[1], 0u);
  EXPECT_EQ(a.col_idx()[2], 2u);
}

TEST(Csr, ValidationAndPatternErrors) {
  EXPECT_THROW(CsrMatrix(2, 2, {0, 1}, {0}, {1.0}), std::invalid_argument);               // short row_ptr
  EXPECT_THROW(CsrMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 2.0}), std::invalid_argument);       // unsorted
  EXPECT_THROW(CsrMatrix(1, 2, {0, 1}, {2}, {1.0}), std::invalid_argument);               // column out of range
  CsrMatrix a = small();
  EXPECT_THROW(a.add(0, 2, 1.0), std::invalid_argument);
  a.add(0, 1, 1.0);
  EXPECT_DOUBLE_EQ(a(0, 1), 2.0);
  EXPECT_THROW(CsrMatrix::combine(1.0, small(), 1.0, CsrMatrix::identity(3)), DimensionError);
  EXPECT_THROW((void)matvec(small(), std::vector<double>(2)), DimensionError);
}

TEST(Csr, MatvecMatchesDense) {
  const TriMesh m = build_rect_mesh(5, 4);
  const CsrMatrix s = assemble_stiffness(m);
  const auto x = random_vector(s.cols(), 3);
  EXPECT_LT(max_abs_diff(matvec(s, x), dense_matvec(to_dense(s), x)), 1e-13);
}

TEST(Csr, SymmetryQueries) {
  EXPECT_TRUE(small().is_symmetric());
  EXPECT_EQ(small().asymmetry_inf_norm(), 0.0);
  const CsrMatrix b = CsrMatrix::from_triplets(2, 2, {{0, 0, 1}, {0, 1, 2}, {1, 0, 5}, {1, 1, 1}});
  EXPECT_FALSE(b.is_symmetric());
  EXPECT_DOUBLE_EQ(b.asymmetry_inf_norm(), 3.0);
  const CsrMatrix c = CsrMatrix::from_triplets(2, 2, {{0, 1, 2}});
  EXPECT_DOUBLE_EQ(c.asymmetry_inf_norm(), 2.0);
}

TEST(Csr, CombineAndDiagonal) {
  const CsrMatrix a = small();
  const CsrMatrix c = CsrMatrix::combine(2.0, a, -1.0, a);
  for (std::size_t k = 0; k < a.nnz(); ++k) EXPECT_DOUBLE_EQ(c.values()[k], a.values()[k]);
  EXPECT_EQ(a.diagonal(), (std::vector<double>{4, 3, 2}));
}

TEST(Cg, SolvesSpdSystemAgainstDenseOracle) {
  const TriMesh m = build_rect_mesh(9, 7);
  const CsrMatrix a = CsrMatrix::combine(1.0, assemble_mass(m), 0.3, assemble_stiffness(m));
  const auto b = random_vector(a.rows(), 11);
  const SolveResult r = solve_cg(a, b, {1e-12, 0});
  ASSERT_TRUE(r.report.converged) << r.report.message;
  const auto x = dense_solve(to_dense(a), b);
  EXPECT_LT(max_abs_diff(r.x, x), 1e-9 * test::max_abs(x));
  EXPECT_LE(r.report.final_residual, 1e-12);
  EXPECT_GT(r.report.iterations, 0u);
}

TEST(Cg, ZeroRightHandSideGivesZero) {
  const SolveResult r = solve_cg(small(), std::vector<double>(3, 0.0));
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 0u);
  EXPECT_EQ(r.x, std::vector<double>(3, 0.0));
}

TEST(Cg, ExactInitialGuessNeedsNoIterations) {
  const CsrMatrix a = small();
  const std::vector<double> x{1.0, -2.0, 0.5};
  const SolveResult r = solve_cg(a, matvec(a, x), {}, x);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 0u);
}

TEST(Cg, ReportsNonConvergence) {
  const TriMesh m = build_rect_mesh(16, 16);
  const CsrMatrix a = CsrMatrix::combine(1.0, assemble_mass(m), 1.0, assemble_stiffness(m));
  const SolveResult r = solve_cg(a, random_vector(a.rows(), 5), {1e-14, 2});
  EXPECT_FALSE(r.report.converged);
  EXPECT_EQ(r.report.iterations, 2u);
  EXPECT_GT(r.report.final_residual, 1e-14);
}

TEST(Cg, RejectsBadInput) {
  EXPECT_THROW(solve_cg(small(), std::vector<double>(2, 1.0)), DimensionError);
  const SolveResult r = solve_cg(small(), std::vector<double>{1.0, NAN, 0.0});
  EXPECT_FALSE(r.report.converged);
}

TEST(BiCgStab, SolvesNonsymmetricSystem) {
  const TriMesh m = build_rect_mesh(6, 6);
  CsrMatrix a = CsrMatrix::combine(1.0, assemble_mass(m), 0.1, assemble_stiffness(m));
  // Upwind-like skew perturbation on the existing pattern.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      if (a.col_idx()[k] > i) a.values()[k] += 0.01;
    }
  }
  ASSERT_FALSE(a.is_symmetric());
  const auto b = random_vector(a.rows(), 2);
  const SolveResult r = solve_bicgstab(a, b, {1e-12, 0});
  ASSERT_TRUE(r.report.converged) << r.report.message;
  const auto x = dense_solve(to_dense(a), b);
  EXPECT_LT(max_abs_diff(r.x, x), 1e-8 * test::max_abs(x));
}

TEST(BiCgStab, ZeroRightHandSideGivesZero) {
  const SolveResult r = solve_bicgstab(small(), std::vector<double>(3, 0.0));
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.x, std::vector<double>(3, 0.0));
}

TEST(Vectors, DotAndNorm) {
  const std::vector<double> a{3.0, 4.0};
  EXPECT_DOUBLE_EQ(dot(a, a), 25.0);
  EXPECT_DOUBLE_EQ(norm2(a), 5.0);
  EXPECT_THROW((void)dot(a, std::vector<double>(3)), DimensionError);
}

}  // namespace
}  // namespace igp
