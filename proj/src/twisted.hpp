#pragma once

// Twisted convolution x_lambda, the twisted Laplacian Delta^lambda, the
// eigenprojectors Lambda_k^lambda, operator-norm estimation against the
// Koch-Tataru exponent rho(r), and the TT* series partial sums.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "etable.hpp"
#include "special.hpp"

namespace htg {

// Samples of a function on the horizontal slice R^{2d} attached to a vertical
// frequency lambda (signed scalar for m = 1; general H-type data reaches this
// layer only after the alpha_lambda rotation).  Row-major over the 2d axes
// (x_1..x_d, y_1..y_d), every axis the same uniform grid.
struct TwistedField {
  int d = 1;
  double lam = 1.0;  // signed; |lam| enters radial factors, the sign the twist
  Axis axis;
  std::vector<cplx> samples;

  static TwistedField from_function(int d, double lam, const Axis& axis,
                                    const std::function<cplx(const Eigen::VectorXd&)>& f);

  std::size_t size() const { return samples.size(); }
  double cell_volume() const;                      // h^{2d}
  Eigen::VectorXd point(std::size_t flat) const;   // grid point of a flat index
  double l2_norm() const;
  double lp_norm(double p) const;                  // p in [1, inf]
  // max |f| on the boundary shell over max |f| (grid-adequacy check)
  double boundary_ratio() const;
};

// g x_lambda h with phase e^{i lam Im(x . conj(w)) / 2}; direct quadrature.
TwistedField twisted_convolve(const TwistedField& g, const TwistedField& h);

// phi_k^{|lam|} sampled on the grid of the given shape
TwistedField laguerre_field(int k, double lam, int d, const Axis& axis);

// Lambda_k^lam g = (2 pi)^{-d} |lam|^d  g x_lam phi_k^{|lam|}
TwistedField project_k(const TwistedField& g, int k);

struct TwistedLaplacianResult {
  TwistedField field;
  TwistedField projected;      // P_N g, the part of g the expansion resolves
  double tail_fraction = 0.0;  // ||g - P_N g|| / ||g||, warns when > 1e-6
};
// Spectral path: expand in Phi_{alpha beta}, multiply by -|lam| (2|alpha| + d).
TwistedLaplacianResult twisted_laplacian_spectral(const TwistedField& g, int N_max);
// 4th-order finite-difference cross-path:
//   Delta - (lam^2/4)|x|^2 - i lam sum_j (y_j d/dx_j - x_j d/dy_j)
// (the angular sign is pinned by the eigenrelation; see tests).  `stride`
// widens the stencil to stride * h; combining strides 1 and 2 by Richardson
// extrapolation, (16 D_1 - D_2) / 15, gives a 6th-order operator.
TwistedField twisted_laplacian_fd(const TwistedField& g, int stride = 1);

// Koch-Tataru exponent; r may be infinity.
double rho_exponent(double r, int d);

struct NormEstimate {
  double value = 0.0;
  bool lower_bound_only = false;
  bool converged = true;
  int iterations = 0;
  std::string method;
};

// ||Lambda_k^lam||_{p -> r}; p = 2 paths are exact-to-quadrature, p < 2 is a
// witness-family lower bound.  d = 1.
NormEstimate projector_norm_estimate(int k, double p, double r, int budget = 200,
                                     double lam_abs = 1.0);

struct SeriesResult {
  bool admissible = true;
  std::string diagnostic;      // which hypothesis fails, when not admissible
  double S_K = 0.0;            // partial sum through k = K
  double tail_bound = 0.0;     // integral-comparison majorant of the tail
  std::vector<double> checkpoints;  // S at k = 1, 2, 4, 8, ... <= K
};

// S_K = sum_{k <= K} ||Lambda_k||_{p -> p'} / (2k+d)^{m(1/r - 1/r') + d(1/p - 1/p')}
// with norms replaced by the rho-exponent bound (measured path needs p = 2,
// which the hypotheses exclude for m = 1).
SeriesResult series_partial_sum(double p, double r, int d, int m, long K,
                                bool measured_norms = false);

}  // namespace htg
