#include "gin/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "gin/errors.hpp"

namespace gin {

std::atomic<long long> spmv_count{0};

SparseSym SparseSym::from_triplets(
    int n, const std::vector<std::tuple<int, int, double>>& entries) {
  std::map<std::pair<int, int>, double> acc;
  for (const auto& [i, j, v] : entries) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw std::invalid_argument("SparseSym::from_triplets: index out of range");
    acc[{i, j}] += v;
    if (i != j) acc[{j, i}] += v;
  }
  SparseSym m;
  m.n = n;
  m.row_offsets.assign(n + 1, 0);
  for (const auto& [ij, v] : acc)
    if (v != 0.0) ++m.row_offsets[ij.first + 1];
  for (int i = 0; i < n; ++i) m.row_offsets[i + 1] += m.row_offsets[i];
  m.col_indices.reserve(m.row_offsets[n]);
  m.values.reserve(m.row_offsets[n]);
  for (const auto& [ij, v] : acc) {  // map order is (row, col) ascending
    if (v == 0.0) continue;
    m.col_indices.push_back(ij.second);
    m.values.push_back(v);
  }
  return m;
}

double SparseSym::at(int i, int j) const {
  for (int p = row_offsets[i]; p < row_offsets[i + 1]; ++p)
    if (col_indices[p] == j) return values[p];
  return 0.0;
}

double stable_sum(std::span<double> terms) {
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

double stable_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("stable_dot: length mismatch");
  std::vector<double> prod(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) prod[i] = a[i] * b[i];
  return stable_sum(prod);
}

std::vector<double> spmv(const SparseSym& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.n)
    throw std::invalid_argument("spmv: dimension mismatch, got " +
                                std::to_string(x.size()) + " for n=" +
                                std::to_string(m.n));
  spmv_count.fetch_add(1, std::memory_order_relaxed);
  std::vector<double> y(m.n, 0.0);
#pragma omp parallel
  {
    std::vector<double> row;
#pragma omp for schedule(static)
    for (int i = 0; i < m.n; ++i) {
      int lo = m.row_offsets[i], hi = m.row_offsets[i + 1];
      row.resize(hi - lo);
      for (int p = lo; p < hi; ++p) row[p - lo] = m.values[p] * x[m.col_indices[p]];
      y[i] = stable_sum(row);
    }
  }
  return y;
}

namespace reference {
std::vector<double> spmv(const SparseSym& m, std::span<const double> x) {
  if (static_cast<int>(x.size()) != m.n)
    throw std::invalid_argument("spmv: dimension mismatch");
  std::vector<double> y(m.n, 0.0);
  for (int i = 0; i < m.n; ++i) {
    double s = 0.0;
    for (int p = m.row_offsets[i]; p < m.row_offsets[i + 1]; ++p)
      s += m.values[p] * x[m.col_indices[p]];
    y[i] = s;
  }
  return y;
}
}  // namespace reference

EighResult dense_eigh(const DenseMat& m) {
  int n = m.rows;
  if (n != m.cols) throw std::invalid_argument("dense_eigh: matrix not square");
  if (n > 64) throw std::invalid_argument("dense_eigh: oracle-scale only (n <= 64)");
  double maxabs = 0.0;
  for (double v : m.values) maxabs = std::max(maxabs, std::fabs(v));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(m.at(i, j) - m.at(j, i)) > 1e-12 * std::max(1.0, maxabs))
        throw std::invalid_argument("dense_eigh: matrix not symmetric");

  DenseMat a = m;
  DenseMat u(n, n);
  for (int i = 0; i < n; ++i) u.at(i, i) = 1.0;

  // cyclic Jacobi rotations
  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a.at(i, j) * a.at(i, j);
    if (off <= 1e-30 * std::max(1.0, maxabs * maxabs)) break;
    if (sweep == max_sweeps - 1)
      throw NumericError("dense_eigh: Jacobi iteration did not converge");
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = a.at(p, q);
        if (apq == 0.0) continue;
        double app = a.at(p, p), aqq = a.at(q, q);
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a.at(k, p), akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a.at(p, k), aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double ukp = u.at(k, p), ukq = u.at(k, q);
          u.at(k, p) = c * ukp - s * ukq;
          u.at(k, q) = s * ukp + c * ukq;
        }
      }
    }
  }

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a.at(i, i) < a.at(j, j); });
  EighResult r;
  r.eigenvalues.resize(n);
  r.eigenvectors = DenseMat(n, n);
  for (int c = 0; c < n; ++c) {
    r.eigenvalues[c] = a.at(order[c], order[c]);
    for (int k = 0; k < n; ++k) r.eigenvectors.at(k, c) = u.at(k, order[c]);
  }
  return r;
}

LambdaMaxResult power_iteration_lambda_max(const SparseSym& m, int max_iters,
                                           double tol) {
  // Pseudorandom (but fixed-seed) start: a structured start such as all-ones
  // is exactly the null space of the normalized Laplacian on regular graphs.
  std::vector<double> v(m.n);
  std::uint64_t s = 0x6a09e667f3bcc909ull;
  for (int i = 0; i < m.n; ++i) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    v[i] = static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53 - 0.5;
  }
  double vnorm = std::sqrt(stable_dot(v, v));
  for (double& x : v) x /= vnorm;

  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> w = spmv(m, v);
    double theta = stable_dot(v, w);  // Rayleigh quotient
    double res2 = 0.0;
    for (int i = 0; i < m.n; ++i) {
      double r = w[i] - theta * v[i];
      res2 += r * r;
    }
    // |theta - lambda_i| <= ||m v - theta v|| for symmetric m
    if (std::sqrt(res2) <= tol * std::max(std::fabs(theta), 1e-300))
      return {theta, true};
    double wnorm = std::sqrt(stable_dot(w, w));
    if (wnorm == 0.0) return {0.0, true};  // m annihilates v; PSD zero matrix
    for (double& x : w) x /= wnorm;
    v = std::move(w);
  }
  // normalized Laplacian spectra lie in [0, 2]
  return {2.0, false};
}

DenseMat to_dense(const SparseSym& m) {
  DenseMat d(m.n, m.n);
  for (int i = 0; i < m.n; ++i)
    for (int p = m.row_offsets[i]; p < m.row_offsets[i + 1]; ++p)
      d.at(i, m.col_indices[p]) = m.values[p];
  return d;
}

}  // namespace gin
