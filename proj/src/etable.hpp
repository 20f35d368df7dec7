#pragma once

// Matrix coefficients E_{alpha beta}^lambda of the Schrodinger representation,
// evaluated by Gauss-Hermite quadrature (the baseline required here; closed
// Laguerre forms are used only as cross-checks in tests).
//
// On the Heisenberg group, with x = (x_1..x_d, y_1..y_d),
//   E_{ab}^lam(x, z) = e^{i lam z} prod_j G_{a_j b_j}(x_j, y_j),
//   G_{ab}(xp, yp)   = e^{i lam xp yp / 2} I_{ab}(xp, yp),
//   I_{ab}(xp, yp)   = int h_a(u + s xp) h_b(u) e^{i s yp u} du,  s = sqrt(lam).
// On a general H-type group E_{ab}^lambda = E^{|lambda|,Heis} after the
// projection alpha_lambda (rotation T_lambda, vertical contraction).

#include <complex>
#include <vector>

#include "special.hpp"
#include "structure.hpp"

namespace htg {

using cplx = std::complex<double>;

// Uniform periodic-style axis: points -L, -L+h, ..., L-h with h = 2L/n.
struct Axis {
  int n = 0;
  double L = 0.0;
  double h() const { return 2.0 * L / n; }
  double point(int i) const { return -L + i * h(); }
};

// I_{ab} for all 0 <= a <= A, 0 <= b <= B at one (xp, yp); s = sqrt(lam).
Eigen::MatrixXcd axis_factors(int A, int B, double s, double xp, double yp);

// Phase-folded per-pair factor tables G_{ab} over the (xp, yp) tensor grid of
// one coordinate pair; the full 2d-dimensional coefficient is a product of
// per-pair lookups.
class HeisETable {
 public:
  HeisETable(double lam_abs, const Axis& axis, int A, int B);

  double lam_abs() const { return lam_; }
  int n() const { return axis_.n; }
  int A() const { return A_; }
  int B() const { return B_; }
  // array over pair index ix * n + iy
  const cplx* factor(int a, int b) const { return tables_[a * (B_ + 1) + b].data(); }
  // Etilde_{alpha beta}(x) at grid multi-index (ix[j], iy[j]), j < d; z = 0
  cplx value(const MultiIndex& alpha, const MultiIndex& beta, const int* ix, const int* iy) const;

 private:
  double lam_;
  Axis axis_;
  int A_, B_;
  std::vector<std::vector<cplx>> tables_;
};

// Single-point Heisenberg coefficient (x = (x_1..x_d, y_1..y_d), vertical z).
cplx heis_matrix_coefficient(const MultiIndex& alpha, const MultiIndex& beta, double lam_abs,
                             const Eigen::VectorXd& x, double z);

// E_{alpha beta}^lambda(p) on a general H-type group via alpha_lambda.
cplx matrix_coefficient(const MultiIndex& alpha, const MultiIndex& beta, const DualFrequency& lam,
                        const GroupPoint& p, const HTypeStructure& s);

// Phi_{alpha beta}^lambda(x) = (2 pi)^{-d/2} lambda^{d/2} Etilde(x)
cplx special_hermite(const MultiIndex& alpha, const MultiIndex& beta, double lam_abs,
                     const Eigen::VectorXd& x);

// e_k^lambda(p) = sum_{|alpha| = k} E_{alpha alpha}^lambda(p); |e_k| <= multiplicity
cplx e_k_diag(int k, const DualFrequency& lam, const GroupPoint& p, const HTypeStructure& s);
double e_k_bound(int k, int d);

}  // namespace htg
