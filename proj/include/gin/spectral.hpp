#pragma once

#include <span>
#include <vector>

#include "gin/linalg.hpp"

namespace gin {

/// Coefficients of a K-term Chebyshev polynomial filter.
struct ChebCoeffs {
  std::vector<double> theta;
  int order() const { return static_cast<int>(theta.size()); }
};

// sum_k theta_k T_k(lt) x via the three-term recurrence
// T_k = 2 lt T_{k-1} - T_{k-2}, T_0 x = x, T_1 x = lt x.
// Performs exactly K-1 sparse matvecs.
std::vector<double> cheb_filter(const SparseSym& lt, std::span<const double> x,
                                const ChebCoeffs& c);

// Exact spectral route: eigendecompose the operator, filter in the Fourier
// basis, transform back. Oracle-scale only; used to cross-check cheb_filter.
std::vector<double> spectral_filter_oracle(const DenseMat& op,
                                           std::span<const double> x,
                                           const ChebCoeffs& c);

// Stack of Chebyshev basis vectors [T_0 x, ..., T_{K-1} x], each length n.
// Shared kernel for the filter and for the gradient path, where the same
// stack supplies d(output)/d(theta_k).
std::vector<std::vector<double>> cheb_basis(const SparseSym& lt,
                                            std::span<const double> x,
                                            int order);

}  // namespace gin
