#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace llb {

/// Compressed-sparse-row matrix. Column indices are strictly increasing
/// within each row and no stored value is NaN or infinite.
struct CsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<std::size_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
  /// Entry (r, c), zero when not stored.
  double at(std::size_t r, std::size_t c) const;
  std::vector<double> diagonal() const;
  /// Throws StructuralError if any CSR invariant is violated.
  void validate() const;
};

/// Accumulates (row, col, value) triples. Duplicates are summed by finalize().
class CooBuilder {
 public:
  CooBuilder(std::size_t n_rows, std::size_t n_cols) : n_rows_(n_rows), n_cols_(n_cols) {}

  void add(std::size_t row, std::size_t col, double value) { entries_.push_back({row, col, value}); }
  void reserve(std::size_t n) { entries_.reserve(n); }
  std::size_t size() const { return entries_.size(); }
  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return n_cols_; }

  /// Builds the CSR matrix. Triples are put in canonical (row, col, value)
  /// order before summation, so the result is bit-identical for any
  /// insertion order. Throws StructuralError on out-of-range indices.
  CsrMatrix finalize() const;

 private:
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };
  std::size_t n_rows_;
  std::size_t n_cols_;
  std::vector<Entry> entries_;
};

/// y = A x with fixed left-to-right accumulation per row.
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);

/// alpha*A + beta*B; both must have the same shape.
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0, double beta = 1.0);
CsrMatrix scaled(const CsrMatrix& a, double s);
/// A (x) I_3 in node-major interleaved ordering.
CsrMatrix kron_identity3(const CsrMatrix& a);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Jacobi, 3x3 nodal block Jacobi, or incomplete LU with zero fill.
enum class Preconditioner { none, jacobi, block_jacobi3, ilu0 };

struct SolveOptions {
  double tol = 1e-10;
  std::size_t max_iter = 10000;
  Preconditioner precond = Preconditioner::jacobi;
};

struct SolveStats {
  std::size_t iterations = 0;
  /// ||b - A x|| / ||b|| recomputed from the returned x.
  double final_relative_residual = 0.0;
  bool converged = false;
};

struct SolveResult {
  std::vector<double> x;
  SolveStats stats;
};

/// Preconditioned conjugate gradients for SPD systems. Throws SolverError on
/// breakdown; non-convergence is reported through stats.converged.
SolveResult solve_cg(const CsrMatrix& a, std::span<const double> b, const SolveOptions& options,
                     std::span<const double> initial_guess = {});

/// Right-preconditioned BiCGStab for general nonsingular systems. A breakdown
/// triggers one restart from the current iterate; a second one throws SolverError.
SolveResult solve_bicgstab(const CsrMatrix& a, std::span<const double> b, const SolveOptions& options,
                           std::span<const double> initial_guess = {});

/// Same as the solvers above but throws SolverError when not converged.
std::vector<double> solve_cg_or_throw(const CsrMatrix& a, std::span<const double> b, const SolveOptions& options,
                                      std::span<const double> initial_guess = {});
std::vector<double> solve_bicgstab_or_throw(const CsrMatrix& a, std::span<const double> b,
                                            const SolveOptions& options,
                                            std::span<const double> initial_guess = {});

/// Direct solve by banded Gaussian elimination with partial pivoting. The
/// bandwidth is taken from the sparsity pattern; meant for desk-scale
/// systems where the iterative solvers stall. Throws SolverError if the
/// matrix is numerically singular.
std::vector<double> solve_banded_lu(const CsrMatrix& a, std::span<const double> b);

}  // namespace llb
