#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace igp {

/// Compressed sparse row matrix. Column indices are strictly increasing
/// within each row; the pattern is fixed at construction and only values
/// change afterwards.
class CsrMatrix {
 public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  CsrMatrix() = default;

  /// Validating constructor: offsets monotone, columns sorted and unique.
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
            std::vector<std::uint32_t> col_idx, std::vector<double> values);

  /// Duplicate (row, col) entries are summed in input order.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets);
  static CsrMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::uint32_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Position of (i, j) in values(), or npos when outside the pattern.
  std::size_t find(std::size_t i, std::size_t j) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  double operator()(std::size_t i, std::size_t j) const;
  /// Accumulate into an existing pattern entry; throws if (i, j) is absent.
  void add(std::size_t i, std::size_t j, double v);

  std::vector<double> diagonal() const;
  bool same_pattern(const CsrMatrix& other) const;
  /// Exact (bitwise value) symmetry check.
  bool is_symmetric() const;
  /// Max absolute row sum of A - A^T.
  double asymmetry_inf_norm() const;

  /// alpha * a + beta * b for matrices sharing a pattern.
  static CsrMatrix combine(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<double> matvec(const CsrMatrix& a, std::span<const double> x);
void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

struct SolverOptions {
  double tol = 1e-10;         // relative residual ||b - Ax|| / ||b||
  std::size_t max_iter = 0;   // 0 means 10 * n

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

struct SolverReport {
  std::size_t iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::string message;  // set on breakdown
};

struct SolveResult {
  std::vector<double> x;
  SolverReport report;
};

/// Jacobi-preconditioned conjugate gradients for SPD systems. The
/// reported residual is recomputed from b - Ax on exit.
SolveResult solve_cg(const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts = {},
                     std::span<const double> x0 = {});

/// Jacobi-preconditioned BiCGStab for general nonsingular systems.
SolveResult solve_bicgstab(const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts = {},
                           std::span<const double> x0 = {});

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace igp
