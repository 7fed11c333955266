#include "llb/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "llb/error.hpp"

namespace llb {

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto begin = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  const auto end = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(std::min(n_rows, n_cols), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

void CsrMatrix::validate() const {
  if (row_ptr.size() != n_rows + 1) throw StructuralError("CSR: row_ptr has wrong length");
  if (row_ptr.front() != 0 || row_ptr.back() != values.size() || col_idx.size() != values.size()) {
    throw StructuralError("CSR: row_ptr does not bracket the stored values");
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1]) throw StructuralError("CSR: row_ptr is decreasing");
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col_idx[k] >= n_cols) throw StructuralError("CSR: column index out of range");
      if (k > row_ptr[r] && col_idx[k] <= col_idx[k - 1]) {
        throw StructuralError("CSR: column indices not strictly increasing in row " + std::to_string(r));
      }
      if (!std::isfinite(values[k])) throw StructuralError("CSR: non-finite value in row " + std::to_string(r));
    }
  }
}

CsrMatrix CooBuilder::finalize() const {
  for (const auto& e : entries_) {
    if (e.row >= n_rows_ || e.col >= n_cols_) {
      throw StructuralError("CooBuilder: entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                            ") outside " + std::to_string(n_rows_) + "x" + std::to_string(n_cols_));
    }
  }
  std::vector<Entry> sorted = entries_;
  std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
    if (a.row != b.row) return a.row < b.row;
    if (a.col != b.col) return a.col < b.col;
    return a.value < b.value;
  });

  CsrMatrix m;
  m.n_rows = n_rows_;
  m.n_cols = n_cols_;
  m.row_ptr.assign(n_rows_ + 1, 0);
  for (std::size_t k = 0; k < sorted.size();) {
    const std::size_t row = sorted[k].row;
    const std::size_t col = sorted[k].col;
    double sum = 0.0;
    while (k < sorted.size() && sorted[k].row == row && sorted[k].col == col) sum += sorted[k++].value;
    m.col_idx.push_back(col);
    m.values.push_back(sum);
    ++m.row_ptr[row + 1];
  }
  for (std::size_t r = 0; r < n_rows_; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.n_cols || y.size() != a.n_rows) {
    throw StructuralError("spmv: dimension mismatch (" + std::to_string(a.n_rows) + "x" + std::to_string(a.n_cols) +
                          " times " + std::to_string(x.size()) + ")");
  }
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    double sum = 0.0;
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) sum += a.values[k] * x[a.col_idx[k]];
    y[r] = sum;
  }
}

std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.n_rows);
  spmv(a, x, y);
  return y;
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha, double beta) {
  if (a.n_rows != b.n_rows || a.n_cols != b.n_cols) throw StructuralError("add: shape mismatch");
  CsrMatrix c;
  c.n_rows = a.n_rows;
  c.n_cols = a.n_cols;
  c.row_ptr.assign(a.n_rows + 1, 0);
  c.col_idx.reserve(a.nnz() + b.nnz());
  c.values.reserve(a.nnz() + b.nnz());
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    std::size_t ka = a.row_ptr[r];
    std::size_t kb = b.row_ptr[r];
    const std::size_t ea = a.row_ptr[r + 1];
    const std::size_t eb = b.row_ptr[r + 1];
    while (ka < ea || kb < eb) {
      const std::size_t ca = ka < ea ? a.col_idx[ka] : std::numeric_limits<std::size_t>::max();
      const std::size_t cb = kb < eb ? b.col_idx[kb] : std::numeric_limits<std::size_t>::max();
      if (ca == cb) {
        c.col_idx.push_back(ca);
        c.values.push_back(alpha * a.values[ka++] + beta * b.values[kb++]);
      } else if (ca < cb) {
        c.col_idx.push_back(ca);
        c.values.push_back(alpha * a.values[ka++]);
      } else {
        c.col_idx.push_back(cb);
        c.values.push_back(beta * b.values[kb++]);
      }
    }
    c.row_ptr[r + 1] = c.values.size();
  }
  return c;
}

CsrMatrix scaled(const CsrMatrix& a, double s) {
  CsrMatrix c = a;
  for (double& v : c.values) v *= s;
  return c;
}

CsrMatrix kron_identity3(const CsrMatrix& a) {
  CsrMatrix c;
  c.n_rows = 3 * a.n_rows;
  c.n_cols = 3 * a.n_cols;
  c.row_ptr.assign(c.n_rows + 1, 0);
  c.col_idx.reserve(3 * a.nnz());
  c.values.reserve(3 * a.nnz());
  for (std::size_t r = 0; r < a.n_rows; ++r) {
    for (std::size_t comp = 0; comp < 3; ++comp) {
      for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
        c.col_idx.push_back(3 * a.col_idx[k] + comp);
        c.values.push_back(a.values[k]);
      }
      c.row_ptr[3 * r + comp + 1] = c.values.size();
    }
  }
  return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {

/// Applies z = P^{-1} r for the configured preconditioner.
class PreconditionerOp {
 public:
  PreconditionerOp(const CsrMatrix& a, Preconditioner kind) : kind_(kind) {
    if (kind_ == Preconditioner::jacobi) {
      inv_diag_ = a.diagonal();
      for (double& d : inv_diag_) d = (d != 0.0) ? 1.0 / d : 1.0;
    } else if (kind_ == Preconditioner::block_jacobi3) {
      if (a.n_rows % 3 != 0) throw StructuralError("block_jacobi3 preconditioner needs a multiple of 3 rows");
      blocks_.resize(a.n_rows / 3);
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        std::array<double, 9> m{};
        for (std::size_t i = 0; i < 3; ++i) {
          for (std::size_t j = 0; j < 3; ++j) m[3 * i + j] = a.at(3 * b + i, 3 * b + j);
        }
        blocks_[b] = invert3(m);
      }
    } else if (kind_ == Preconditioner::ilu0) {
      factorize_ilu0(a);
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    switch (kind_) {
      case Preconditioner::none:
        std::copy(r.begin(), r.end(), z.begin());
        break;
      case Preconditioner::jacobi:
        for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag_[i] * r[i];
        break;
      case Preconditioner::block_jacobi3:
        for (std::size_t b = 0; b < blocks_.size(); ++b) {
          const auto& m = blocks_[b];
          for (std::size_t i = 0; i < 3; ++i) {
            z[3 * b + i] = m[3 * i] * r[3 * b] + m[3 * i + 1] * r[3 * b + 1] + m[3 * i + 2] * r[3 * b + 2];
          }
        }
        break;
      case Preconditioner::ilu0:
        apply_ilu0(r, z);
        break;
    }
  }

 private:
  // Incomplete LU on the sparsity pattern of A (IKJ variant). L has a unit
  // diagonal and is stored together with U in lu_.
  void factorize_ilu0(const CsrMatrix& a) {
    lu_ = a;
    const std::size_t n = a.n_rows;
    diag_pos_.assign(n, 0);
    std::vector<std::ptrdiff_t> pos(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
      bool found = false;
      for (std::size_t p = lu_.row_ptr[i]; p < lu_.row_ptr[i + 1]; ++p) {
        if (lu_.col_idx[p] == i) {
          diag_pos_[i] = p;
          found = true;
        }
      }
      if (!found) throw StructuralError("ilu0 preconditioner needs every diagonal entry stored");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t begin = lu_.row_ptr[i];
      const std::size_t end = lu_.row_ptr[i + 1];
      for (std::size_t p = begin; p < end; ++p) pos[lu_.col_idx[p]] = static_cast<std::ptrdiff_t>(p);
      for (std::size_t p = begin; p < end && lu_.col_idx[p] < i; ++p) {
        const std::size_t k = lu_.col_idx[p];
        const double pivot = lu_.values[diag_pos_[k]];
        if (pivot == 0.0) throw SolverError("ilu0 preconditioner: zero pivot");
        const double lik = lu_.values[p] / pivot;
        lu_.values[p] = lik;
        for (std::size_t q = diag_pos_[k] + 1; q < lu_.row_ptr[k + 1]; ++q) {
          const std::ptrdiff_t target = pos[lu_.col_idx[q]];
          if (target >= 0) lu_.values[static_cast<std::size_t>(target)] -= lik * lu_.values[q];
        }
      }
      for (std::size_t p = begin; p < end; ++p) pos[lu_.col_idx[p]] = -1;
      if (lu_.values[diag_pos_[i]] == 0.0) throw SolverError("ilu0 preconditioner: zero pivot");
    }
  }

  void apply_ilu0(std::span<const double> r, std::span<double> z) const {
    const std::size_t n = lu_.n_rows;
    for (std::size_t i = 0; i < n; ++i) {
      double s = r[i];
      for (std::size_t p = lu_.row_ptr[i]; p < diag_pos_[i]; ++p) s -= lu_.values[p] * z[lu_.col_idx[p]];
      z[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = z[i];
      for (std::size_t p = diag_pos_[i] + 1; p < lu_.row_ptr[i + 1]; ++p) s -= lu_.values[p] * z[lu_.col_idx[p]];
      z[i] = s / lu_.values[diag_pos_[i]];
    }
  }

  static std::array<double, 9> invert3(const std::array<double, 9>& m) {
    const double c00 = m[4] * m[8] - m[5] * m[7];
    const double c01 = m[5] * m[6] - m[3] * m[8];
    const double c02 = m[3] * m[7] - m[4] * m[6];
    const double det = m[0] * c00 + m[1] * c01 + m[2] * c02;
    if (det == 0.0 || !std::isfinite(det)) return {1, 0, 0, 0, 1, 0, 0, 0, 1};
    const double inv = 1.0 / det;
    return {c00 * inv,
            (m[2] * m[7] - m[1] * m[8]) * inv,
            (m[1] * m[5] - m[2] * m[4]) * inv,
            c01 * inv,
            (m[0] * m[8] - m[2] * m[6]) * inv,
            (m[2] * m[3] - m[0] * m[5]) * inv,
            c02 * inv,
            (m[1] * m[6] - m[0] * m[7]) * inv,
            (m[0] * m[4] - m[1] * m[3]) * inv};
  }

  Preconditioner kind_;
  std::vector<double> inv_diag_;
  std::vector<std::array<double, 9>> blocks_;
  CsrMatrix lu_;
  std::vector<std::size_t> diag_pos_;
};

void check_system(const CsrMatrix& a, std::span<const double> b, std::span<const double> x0, const char* who) {
  if (a.n_rows != a.n_cols) throw StructuralError(std::string(who) + ": matrix is not square");
  if (b.size() != a.n_rows) throw StructuralError(std::string(who) + ": right-hand side has wrong length");
  if (!x0.empty() && x0.size() != a.n_rows) throw StructuralError(std::string(who) + ": initial guess has wrong length");
}

double true_residual(const CsrMatrix& a, std::span<const double> b, std::span<const double> x, std::span<double> r) {
  spmv(a, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return norm2(r);
}

}  // namespace

SolveResult solve_cg(const CsrMatrix& a, std::span<const double> b, const SolveOptions& options,
                     std::span<const double> initial_guess) {
  check_system(a, b, initial_guess, "solve_cg");
  const std::size_t n = b.size();
  SolveResult result;
  result.x.assign(n, 0.0);
  if (!initial_guess.empty()) std::copy(initial_guess.begin(), initial_guess.end(), result.x.begin());

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(result.x.begin(), result.x.end(), 0.0);
    result.stats = {0, 0.0, true};
    return result;
  }

  const PreconditionerOp precond(a, options.precond);
  std::vector<double> r(n), z(n), p(n), ap(n);
  auto& x = result.x;
  double rnorm = true_residual(a, b, x, r);
  std::size_t it = 0;

  while (rnorm > options.tol * bnorm && it < options.max_iter) {
    // (Re)start from the true residual.
    precond.apply(r, z);
    p = z;
    double rz = dot(r, z);
    while (it < options.max_iter) {
      spmv(a, p, ap);
      const double curvature = dot(p, ap);
      if (!(curvature > 0.0)) {
        throw SolverError("solve_cg: breakdown (non-positive curvature " + std::to_string(curvature) +
                          ") at iteration " + std::to_string(it));
      }
      const double step = rz / curvature;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += step * p[i];
        r[i] -= step * ap[i];
      }
      ++it;
      if (norm2(r) <= options.tol * bnorm) break;
      precond.apply(r, z);
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    rnorm = true_residual(a, b, x, r);
  }

  result.stats.iterations = it;
  result.stats.final_relative_residual = rnorm / bnorm;
  result.stats.converged = result.stats.final_relative_residual <= options.tol;
  return result;
}

SolveResult solve_bicgstab(const CsrMatrix& a, std::span<const double> b, const SolveOptions& options,
                           std::span<const double> initial_guess) {
  check_system(a, b, initial_guess, "solve_bicgstab");
  const std::size_t n = b.size();
  SolveResult result;
  result.x.assign(n, 0.0);
  if (!initial_guess.empty()) std::copy(initial_guess.begin(), initial_guess.end(), result.x.begin());

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(result.x.begin(), result.x.end(), 0.0);
    result.stats = {0, 0.0, true};
    return result;
  }

  const PreconditionerOp precond(a, options.precond);
  std::vector<double> r(n), r_hat(n), p(n), p_hat(n), v(n), s(n), s_hat(n), t(n);
  auto& x = result.x;
  const double target = options.tol * bnorm;
  double rnorm = true_residual(a, b, x, r);
  std::size_t it = 0;
  int breakdowns = 0;
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();

  while (rnorm > target && it < options.max_iter) {
    r_hat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    bool broke_down = false;

    while (it < options.max_iter) {
      const double rho_next = dot(r_hat, r);
      if (std::abs(rho_next) <= tiny || std::abs(omega) <= tiny) {
        broke_down = true;
        break;
      }
      const double beta = (rho_next / rho) * (alpha / omega);
      rho = rho_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      precond.apply(p, p_hat);
      spmv(a, p_hat, v);
      const double denom = dot(r_hat, v);
      if (std::abs(denom) <= tiny) {
        broke_down = true;
        break;
      }
      alpha = rho / denom;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      ++it;
      if (norm2(s) <= target) {
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p_hat[i];
        break;
      }
      precond.apply(s, s_hat);
      spmv(a, s_hat, t);
      const double tt = dot(t, t);
      if (tt <= tiny) {
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p_hat[i];
        broke_down = true;
        break;
      }
      omega = dot(t, s) / tt;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p_hat[i] + omega * s_hat[i];
        r[i] = s[i] - omega * t[i];
      }
      if (norm2(r) <= target) break;
    }
    rnorm = true_residual(a, b, x, r);
    if (broke_down && rnorm > target) {
      if (++breakdowns > 1) {
        throw SolverError("solve_bicgstab: repeated breakdown at iteration " + std::to_string(it) +
                          ", relative residual " + std::to_string(rnorm / bnorm));
      }
    }
  }

  result.stats.iterations = it;
  result.stats.final_relative_residual = rnorm / bnorm;
  result.stats.converged = result.stats.final_relative_residual <= options.tol;
  return result;
}

namespace {

std::vector<double> or_throw(SolveResult result, const char* who, const SolveOptions& options) {
  if (!result.stats.converged) {
    throw SolverError(std::string(who) + ": not converged after " + std::to_string(result.stats.iterations) +
                      " iterations (relative residual " + std::to_string(result.stats.final_relative_residual) +
                      ", tolerance " + std::to_string(options.tol) + ")");
  }
  return std::move(result.x);
}

}  // namespace

std::vector<double> solve_cg_or_throw(const CsrMatrix& a, std::span<const double> b, const SolveOptions& options,
                                      std::span<const double> initial_guess) {
  return or_throw(solve_cg(a, b, options, initial_guess), "solve_cg", options);
}

std::vector<double> solve_bicgstab_or_throw(const CsrMatrix& a, std::span<const double> b,
                                            const SolveOptions& options, std::span<const double> initial_guess) {
  return or_throw(solve_bicgstab(a, b, options, initial_guess), "solve_bicgstab", options);
}

std::vector<double> solve_banded_lu(const CsrMatrix& a, std::span<const double> b) {
  if (a.n_rows != a.n_cols) throw StructuralError("solve_banded_lu: matrix is not square");
  if (b.size() != a.n_rows) throw StructuralError("solve_banded_lu: right-hand side has wrong length");
  const std::size_t n = a.n_rows;
  std::size_t kl = 0;
  std::size_t ku = 0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
      const std::size_t c = a.col_idx[p];
      if (c < r) kl = std::max(kl, r - c);
      if (c > r) ku = std::max(ku, c - r);
    }
  }
  // Row r holds columns [r - kl, r + kl + ku]; pivoting widens U by kl.
  const std::size_t width = 2 * kl + ku + 1;
  std::vector<double> band(n * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return band[r * width + (c + kl - r)]; };
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) at(r, a.col_idx[p]) = a.values[p];
  }
  std::vector<double> x(b.begin(), b.end());
  double scale = 0.0;
  for (double v : a.values) scale = std::max(scale, std::abs(v));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t last_row = std::min(n - 1, k + kl);
    const std::size_t last_col = std::min(n - 1, k + kl + ku);
    std::size_t piv = k;
    for (std::size_t r = k + 1; r <= last_row; ++r) {
      if (std::abs(at(r, k)) > std::abs(at(piv, k))) piv = r;
    }
    if (!(std::abs(at(piv, k)) > 1e-300 * std::max(1.0, scale))) {
      throw SolverError("solve_banded_lu: matrix is numerically singular");
    }
    if (piv != k) {
      for (std::size_t c = k; c <= last_col; ++c) std::swap(at(k, c), at(piv, c));
      std::swap(x[k], x[piv]);
    }
    const double d = at(k, k);
    for (std::size_t r = k + 1; r <= last_row; ++r) {
      const double f = at(r, k) / d;
      if (f == 0.0) continue;
      at(r, k) = 0.0;
      for (std::size_t c = k + 1; c <= last_col; ++c) at(r, c) -= f * at(k, c);
      x[r] -= f * x[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t last_col = std::min(n - 1, k + kl + ku);
    double s = x[k];
    for (std::size_t c = k + 1; c <= last_col; ++c) s -= at(k, c) * x[c];
    x[k] = s / at(k, k);
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw SolverError("solve_banded_lu: non-finite solution");
  }
  return x;
}

}  // namespace llb
