#include "igp/sparse.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace igp {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::uint32_t> col_idx, std::vector<double> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != col_idx_.size() ||
      col_idx_.size() != values_.size()) {
    throw DimensionError("CsrMatrix: inconsistent storage arrays");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw DimensionError("CsrMatrix: row offsets not monotone");
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= cols_) throw DimensionError("CsrMatrix: column index out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) {
        throw DimensionError(fmt::format("CsrMatrix: row {} columns not strictly increasing", i));
      }
    }
  }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw DimensionError("from_triplets: index out of range");
  }
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> ptr(rows + 1, 0);
  std::vector<std::uint32_t> idx;
  std::vector<double> val;
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    if (k > 0 && triplets[k - 1].row == t.row && triplets[k - 1].col == t.col) {
      val.back() += t.value;
      continue;
    }
    idx.push_back(static_cast<std::uint32_t>(t.col));
    val.push_back(t.value);
    ++ptr[t.row + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) ptr[i + 1] += ptr[i];
  return CsrMatrix(rows, cols, std::move(ptr), std::move(idx), std::move(val));
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  std::vector<std::size_t> ptr(n + 1);
  std::vector<std::uint32_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    ptr[i + 1] = i + 1;
    idx[i] = static_cast<std::uint32_t>(i);
  }
  return CsrMatrix(n, n, std::move(ptr), std::move(idx), std::vector<double>(n, 1.0));
}

std::size_t CsrMatrix::find(std::size_t i, std::size_t j) const {
  if (i >= rows_) return npos;
  const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return npos;
  return static_cast<std::size_t>(it - col_idx_.begin());
}

double CsrMatrix::operator()(std::size_t i, std::size_t j) const {
  const std::size_t k = find(i, j);
  return k == npos ? 0.0 : values_[k];
}

void CsrMatrix::add(std::size_t i, std::size_t j, double v) {
  const std::size_t k = find(i, j);
  if (k == npos) throw DimensionError(fmt::format("CsrMatrix::add: ({}, {}) not in pattern", i, j));
  values_[k] += v;
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (*this)(i, i);
  return d;
}

bool CsrMatrix::same_pattern(const CsrMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && row_ptr_ == other.row_ptr_ &&
         col_idx_ == other.col_idx_;
}

bool CsrMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t t = find(col_idx_[k], i);
      if (t == npos || values_[t] != values_[k]) return false;
    }
  }
  return true;
}

double CsrMatrix::asymmetry_inf_norm() const {
  if (rows_ != cols_) throw DimensionError("asymmetry_inf_norm: matrix not square");
  std::vector<Triplet> trip;
  trip.reserve(nnz());
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) trip.push_back({col_idx_[k], i, values_[k]});
  }
  const CsrMatrix t = from_triplets(rows_, cols_, std::move(trip));
  double worst = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    // Merge the sorted rows of A and A^T.
    std::size_t ka = row_ptr_[i], kt = t.row_ptr_[i];
    const std::size_t ea = row_ptr_[i + 1], et = t.row_ptr_[i + 1];
    double row = 0.0;
    while (ka < ea || kt < et) {
      if (kt == et || (ka < ea && col_idx_[ka] < t.col_idx_[kt])) {
        row += std::abs(values_[ka++]);
      } else if (ka == ea || t.col_idx_[kt] < col_idx_[ka]) {
        row += std::abs(t.values_[kt++]);
      } else {
        row += std::abs(values_[ka++] - t.values_[kt++]);
      }
    }
    worst = std::max(worst, row);
  }
  return worst;
}

CsrMatrix CsrMatrix::combine(double alpha, const CsrMatrix& a, double beta, const CsrMatrix& b) {
  if (!a.same_pattern(b)) throw DimensionError("CsrMatrix::combine: patterns differ");
  CsrMatrix out = a;
  for (std::size_t k = 0; k < out.values_.size(); ++k) out.values_[k] = alpha * a.values_[k] + beta * b.values_[k];
  return out;
}

void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols() || y.size() != a.rows()) {
    throw DimensionError(fmt::format("matvec: {}x{} matrix with x[{}], y[{}]", a.rows(), a.cols(), x.size(),
                                     y.size()));
  }
  const auto ptr = a.row_ptr();
  const auto idx = a.col_idx();
  const auto val = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[idx[k]];
    y[i] = s;
  }
}

std::vector<double> matvec(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows());
  matvec(a, x, y);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError(fmt::format("dot: sizes {} and {}", a.size(), b.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {

struct Prepared {
  std::vector<double> x;
  std::vector<double> inv_diag;
  std::size_t max_iter = 0;
  double bnorm = 0.0;
};

Prepared prepare(const char* who, const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts,
                 std::span<const double> x0) {
  if (a.rows() != a.cols() || b.size() != a.rows() || (!x0.empty() && x0.size() != a.rows())) {
    throw DimensionError(fmt::format("{}: {}x{} system with b[{}], x0[{}]", who, a.rows(), a.cols(), b.size(),
                                     x0.size()));
  }
  Prepared p;
  const std::size_t n = a.rows();
  p.x = x0.empty() ? std::vector<double>(n, 0.0) : std::vector<double>(x0.begin(), x0.end());
  p.inv_diag = a.diagonal();
  for (double& d : p.inv_diag) d = (d != 0.0) ? 1.0 / d : 1.0;
  p.max_iter = opts.max_iter ? opts.max_iter : 10 * n;
  p.bnorm = norm2(b);
  return p;
}

void residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x, std::vector<double>& r) {
  matvec(a, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

}  // namespace

SolveResult solve_cg(const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts,
                     std::span<const double> x0) {
  Prepared p = prepare("solve_cg", a, b, opts, x0);
  const std::size_t n = a.rows();
  SolveResult out;
  if (p.bnorm == 0.0) {
    out.x.assign(n, 0.0);
    out.report.converged = true;
    return out;
  }
  if (!std::isfinite(p.bnorm)) {
    out.x = std::move(p.x);
    out.report.final_residual = std::numeric_limits<double>::quiet_NaN();
    out.report.message = "non-finite right-hand side";
    return out;
  }

  std::vector<double> r(n), z(n), dir(n), ad(n);
  residual(a, b, p.x, r);
  double rel = norm2(r) / p.bnorm;
  std::size_t it = 0;
  bool restart = true;
  double rz = 0.0;

  while (rel > opts.tol && it < p.max_iter) {
    if (restart) {
      for (std::size_t i = 0; i < n; ++i) dir[i] = z[i] = p.inv_diag[i] * r[i];
      rz = dot(r, z);
      restart = false;
    }
    matvec(a, dir, ad);
    const double curv = dot(dir, ad);
    const double alpha = rz / curv;
    if (!std::isfinite(alpha) || curv <= 0.0) {
      out.report.message = fmt::format("breakdown at iteration {} (p.Ap = {})", it, curv);
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      p.x[i] += alpha * dir[i];
      r[i] -= alpha * ad[i];
    }
    ++it;
    rel = norm2(r) / p.bnorm;
    if (rel <= opts.tol) {
      // Confirm against the true residual; drift restarts the recurrence.
      residual(a, b, p.x, r);
      rel = norm2(r) / p.bnorm;
      restart = true;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = p.inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) dir[i] = z[i] + beta * dir[i];
  }

  residual(a, b, p.x, r);
  out.report.iterations = it;
  out.report.final_residual = norm2(r) / p.bnorm;
  out.report.converged = std::isfinite(out.report.final_residual) && out.report.final_residual <= opts.tol;
  if (!std::isfinite(out.report.final_residual) && out.report.message.empty()) {
    out.report.message = "NaN encountered";
  }
  out.x = std::move(p.x);
  return out;
}

SolveResult solve_bicgstab(const CsrMatrix& a, std::span<const double> b, const SolverOptions& opts,
                           std::span<const double> x0) {
  Prepared p = prepare("solve_bicgstab", a, b, opts, x0);
  const std::size_t n = a.rows();
  SolveResult out;
  if (p.bnorm == 0.0) {
    out.x.assign(n, 0.0);
    out.report.converged = true;
    return out;
  }

  std::vector<double> r(n), rhat(n), v(n, 0.0), dir(n, 0.0), phat(n), s(n), shat(n), t(n);
  residual(a, b, p.x, r);
  rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  double rel = norm2(r) / p.bnorm;
  std::size_t it = 0;

  while (rel > opts.tol && it < p.max_iter) {
    const double rho_new = dot(rhat, r);
    if (rho_new == 0.0 || !std::isfinite(rho_new)) {
      out.report.message = fmt::format("breakdown at iteration {} (rho = {})", it, rho_new);
      break;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] = r[i] + beta * (dir[i] - omega * v[i]);
      phat[i] = p.inv_diag[i] * dir[i];
    }
    matvec(a, phat, v);
    alpha = rho / dot(rhat, v);
    if (!std::isfinite(alpha)) {
      out.report.message = fmt::format("breakdown at iteration {} (alpha not finite)", it);
      break;
    }
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    ++it;
    if (norm2(s) / p.bnorm <= opts.tol) {
      for (std::size_t i = 0; i < n; ++i) p.x[i] += alpha * phat[i];
      residual(a, b, p.x, r);
      rel = norm2(r) / p.bnorm;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) shat[i] = p.inv_diag[i] * s[i];
    matvec(a, shat, t);
    const double tt = dot(t, t);
    omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
    if (omega == 0.0 || !std::isfinite(omega)) {
      for (std::size_t i = 0; i < n; ++i) p.x[i] += alpha * phat[i];
      out.report.message = fmt::format("breakdown at iteration {} (omega = {})", it, omega);
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      p.x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    rel = norm2(r) / p.bnorm;
  }

  residual(a, b, p.x, r);
  out.report.iterations = it;
  out.report.final_residual = norm2(r) / p.bnorm;
  out.report.converged = std::isfinite(out.report.final_residual) && out.report.final_residual <= opts.tol;
  if (!std::isfinite(out.report.final_residual) && out.report.message.empty()) {
    out.report.message = "NaN encountered";
  }
  out.x = std::move(p.x);
  return out;
}

}  // namespace igp
