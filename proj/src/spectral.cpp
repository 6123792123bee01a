#include "gin/spectral.hpp"

#include <stdexcept>

namespace gin {

std::vector<std::vector<double>> cheb_basis(const SparseSym& lt,
                                            std::span<const double> x,
                                            int order) {
  if (order < 1) throw std::invalid_argument("cheb_basis: order must be >= 1");
  if (static_cast<int>(x.size()) != lt.n)
    throw std::invalid_argument("cheb_basis: dimension mismatch");
  std::vector<std::vector<double>> t;
  t.reserve(order);
  t.emplace_back(x.begin(), x.end());
  if (order >= 2) t.push_back(spmv(lt, x));
  for (int k = 2; k < order; ++k) {
    std::vector<double> next = spmv(lt, t[k - 1]);
    for (int i = 0; i < lt.n; ++i) next[i] = 2.0 * next[i] - t[k - 2][i];
    t.push_back(std::move(next));
  }
  return t;
}

std::vector<double> cheb_filter(const SparseSym& lt, std::span<const double> x,
                                const ChebCoeffs& c) {
  auto basis = cheb_basis(lt, x, c.order());
  std::vector<double> out(lt.n, 0.0);
  for (int k = 0; k < c.order(); ++k)
    for (int i = 0; i < lt.n; ++i) out[i] += c.theta[k] * basis[k][i];
  return out;
}

std::vector<double> spectral_filter_oracle(const DenseMat& op,
                                           std::span<const double> x,
                                           const ChebCoeffs& c) {
  if (op.rows != static_cast<int>(x.size()))
    throw std::invalid_argument("spectral_filter_oracle: dimension mismatch");
  EighResult eig = dense_eigh(op);
  int n = op.rows;

  // forward transform: x_hat = U^T x
  std::vector<double> x_hat(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) x_hat[i] += eig.eigenvectors.at(k, i) * x[k];

  // filter each spectral coefficient by sum_k theta_k T_k(lambda_i)
  for (int i = 0; i < n; ++i) {
    double lam = eig.eigenvalues[i];
    double tkm2 = 1.0, tkm1 = lam;
    double g = c.theta[0];
    if (c.order() >= 2) g += c.theta[1] * lam;
    for (int k = 2; k < c.order(); ++k) {
      double tk = 2.0 * lam * tkm1 - tkm2;
      g += c.theta[k] * tk;
      tkm2 = tkm1;
      tkm1 = tk;
    }
    x_hat[i] *= g;
  }

  // inverse transform: y = U x_hat
  std::vector<double> y(n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) y[k] += eig.eigenvectors.at(k, i) * x_hat[i];
  return y;
}

}  // namespace gin
