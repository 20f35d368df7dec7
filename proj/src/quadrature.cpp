#include "quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "special.hpp"

namespace htg {

namespace {

// Golub-Welsch: eigen-decompose the symmetric Jacobi matrix with off-diagonal
// b_i; weights are mu0 * v0^2.
QuadratureRule1D golub_welsch(const std::vector<double>& offdiag, double mu0) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    J(i, i + 1) = offdiag[i];
    J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);  // ascending
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  rule.exactness_degree = 2 * n - 1;
  return rule;
}

}  // namespace

const QuadratureRule1D& gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1 required");
  static std::map<int, QuadratureRule1D> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<double> b(n - 1);
  for (int i = 1; i < n; ++i) b[i - 1] = std::sqrt(0.5 * i);
  auto rule = golub_welsch(b, std::sqrt(M_PI));
  // Eigenvector-based weights at extreme nodes are pure rounding noise
  // (~1e-32) while the true weights are e^{-x^2}-small; downstream code
  // multiplies by e^{+x^2}-scaled integrands, so recompute weights with the
  // classical stable formula w_i = 1 / (n htil_{n-1}(x_i)^2), where htil is
  // the e^{x^2/2}-scaled normalized Hermite function (finite at the nodes).
  {
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) {
      hermite_seq(n - 1, rule.nodes[i], h.data(), /*scaled=*/true);
      rule.weights[i] = 1.0 / (n * h[n - 1] * h[n - 1]);
    }
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

QuadratureRule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  if (!(a < b)) throw std::invalid_argument("gauss_legendre: a < b required");
  static std::map<int, QuadratureRule1D> cache;  // reference rule on [-1,1]
  static std::mutex mtx;
  QuadratureRule1D ref;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
      std::vector<double> off(n - 1);
      for (int i = 1; i < n; ++i) off[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
      it = cache.emplace(n, golub_welsch(off, 2.0)).first;
    }
    ref = it->second;
  }
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    ref.nodes[i] = mid + half * ref.nodes[i];
    ref.weights[i] *= half;
  }
  return ref;
}

}  // namespace htg
