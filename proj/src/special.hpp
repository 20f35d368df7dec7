#pragma once

// Spectral special functions: 1-D Hermite functions (normalized recurrence),
// multi-Hermite functions Phi_alpha^lambda, Laguerre functions phi_k^lambda,
// and multi-index utilities.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace htg {

using MultiIndex = std::vector<int>;

int multi_order(const MultiIndex& a);
// all alpha in N^d with |alpha| = k, lexicographic
std::vector<MultiIndex> multi_indices_of_order(int d, int k);
// all alpha with |alpha| <= N, graded then lexicographic
std::vector<MultiIndex> multi_indices_up_to(int d, int N);
// dim of the k-th eigenspace block: binom(k+d-1, d-1)
std::int64_t multiplicity(int k, int d);

// h_k(t) = (2^k sqrt(pi) k!)^{-1/2} H_k(t) e^{-t^2/2} via
// h_{k+1} = t sqrt(2/(k+1)) h_k - sqrt(k/(k+1)) h_{k-1}
double hermite_1d(int k, double t);
// fills out[0..n] with h_k(t); scaled=true gives h_k(t) e^{t^2/2}
void hermite_seq(int n, double t, double* out, bool scaled = false);

// Phi_alpha^lambda(xi) = lambda^{d/4} prod_j h_{alpha_j}(sqrt(lambda) xi_j)
double multi_hermite(const MultiIndex& alpha, double lam_abs, const Eigen::VectorXd& xi);

// Laguerre polynomial L_k^a(t) by the stable three-term recurrence
double laguerre_poly(int k, int a, double t);
// phi_k^lambda(x) = L_k^{d-1}(lambda |x|^2 / 2) e^{-lambda |x|^2 / 4}, x in R^{2d}
double laguerre_fn(int k, double lam_abs, const Eigen::VectorXd& x);

}  // namespace htg
