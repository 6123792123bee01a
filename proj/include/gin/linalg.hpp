#pragma once

#include <atomic>
#include <span>
#include <tuple>
#include <vector>

namespace gin {

/// Symmetric sparse matrix, compressed row storage. Both triangles stored;
/// column indices strictly increasing within a row, no explicit zeros.
struct SparseSym {
  int n = 0;
  std::vector<int> row_offsets;  // size n+1
  std::vector<int> col_indices;
  std::vector<double> values;

  // Build from upper-triangle (or mixed) triplets; mirror entries are added
  // automatically. Duplicate coordinates are summed, zeros dropped.
  static SparseSym from_triplets(
      int n, const std::vector<std::tuple<int, int, double>>& entries);

  double at(int i, int j) const;
  int nnz() const { return static_cast<int>(col_indices.size()); }
};

struct DenseMat {
  int rows = 0, cols = 0;
  std::vector<double> values;  // row-major

  DenseMat() = default;
  DenseMat(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}
  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

// Sums a list of terms in value-sorted order. The result depends only on the
// multiset of terms, so reductions over vertex-indexed ranges stay
// bit-identical under any relabeling of the vertices. Scratch is sorted
// in place.
double stable_sum(std::span<double> terms);
double stable_dot(std::span<const double> a, std::span<const double> b);

// Matvec counter, used by tests to pin the cost contract of the
// Chebyshev recurrence.
extern std::atomic<long long> spmv_count;

// y = m x, rows accumulated with stable_sum. Row-parallel under OpenMP.
std::vector<double> spmv(const SparseSym& m, std::span<const double> x);

namespace reference {
// Plain serial matvec, kept as the cross-check and benchmark baseline.
std::vector<double> spmv(const SparseSym& m, std::span<const double> x);
}  // namespace reference

struct EighResult {
  std::vector<double> eigenvalues;  // ascending
  DenseMat eigenvectors;            // columns, aligned with eigenvalues
};

// Cyclic Jacobi; oracle-scale only (rows <= 64 enforced).
EighResult dense_eigh(const DenseMat& m);

struct LambdaMaxResult {
  double value = 0.0;
  bool converged = false;  // false means the 2.0 fallback was used
};

// Deterministic power iteration (all-ones start). On non-convergence returns
// the normalized-Laplacian spectral bound 2.0 with converged=false.
LambdaMaxResult power_iteration_lambda_max(const SparseSym& m,
                                           int max_iters = 200,
                                           double tol = 1e-6);

DenseMat to_dense(const SparseSym& m);

}  // namespace gin
