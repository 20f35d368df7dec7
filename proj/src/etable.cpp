#include "etable.hpp"

#include <cmath>
#include <stdexcept>

#include "quadrature.hpp"
#include "util/parallel.hpp"

namespace htg {

namespace {

// Node count for the shifted Gauss-Hermite rule: must cover polynomial degree
// A+B and the oscillation e^{i s yp v} (frequency b needs ~ b^2/2 nodes).
int pick_gh_n(int A, int B, double osc) {
  int n = A + B + 32 + static_cast<int>(std::ceil(0.5 * osc * osc));
  n = ((n + 31) / 32) * 32;
  return std::min(n, 320);
}

}  // namespace

Eigen::MatrixXcd axis_factors(int A, int B, double s, double xp, double yp) {
  // Shift u = v - c with c = s xp / 2 symmetrizes the Gaussian decay:
  //   I = e^{-i s yp c} sum_q w_q e^{-c^2} e^{i s yp v_q}
  //       htil_a(v_q + c) htil_b(v_q - c),            htil_k = h_k e^{t^2/2}.
  const double c = 0.5 * s * xp;
  const double syp = s * yp;
  const auto& gh = gauss_hermite(pick_gh_n(A, B, std::abs(syp)));
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Zero(A + 1, B + 1);
  const double damp = std::exp(-c * c);
  if (damp == 0.0) return I;
  std::vector<double> ha(A + 1), hb(B + 1);
  for (std::size_t q = 0; q < gh.nodes.size(); ++q) {
    const double v = gh.nodes[q];
    hermite_seq(A, v + c, ha.data(), /*scaled=*/true);
    hermite_seq(B, v - c, hb.data(), /*scaled=*/true);
    const cplx w = gh.weights[q] * damp * cplx(std::cos(syp * v), std::sin(syp * v));
    for (int a = 0; a <= A; ++a) {
      const cplx wa = w * ha[a];
      for (int b = 0; b <= B; ++b) I(a, b) += wa * hb[b];
    }
  }
  return I * cplx(std::cos(syp * c), -std::sin(syp * c));
}

HeisETable::HeisETable(double lam_abs, const Axis& axis, int A, int B)
    : lam_(lam_abs), axis_(axis), A_(A), B_(B) {
  if (!(lam_abs > 0)) throw std::invalid_argument("HeisETable: lambda > 0 required");
  const int n = axis.n;
  tables_.assign((A + 1) * (B + 1), std::vector<cplx>(n * n));
  const double s = std::sqrt(lam_abs);
  parallel_for(static_cast<std::size_t>(n) * n, [&](std::size_t pair) {
    const int ix = static_cast<int>(pair) / n, iy = static_cast<int>(pair) % n;
    const double xp = axis.point(ix), yp = axis.point(iy);
    Eigen::MatrixXcd I = axis_factors(A, B, s, xp, yp);
    const double ph = 0.5 * lam_ * xp * yp;
    const cplx phase(std::cos(ph), std::sin(ph));
    for (int a = 0; a <= A; ++a)
      for (int b = 0; b <= B; ++b) tables_[a * (B + 1) + b][pair] = phase * I(a, b);
  });
}

cplx HeisETable::value(const MultiIndex& alpha, const MultiIndex& beta, const int* ix,
                       const int* iy) const {
  cplx v(1.0, 0.0);
  for (std::size_t j = 0; j < alpha.size(); ++j)
    v *= factor(alpha[j], beta[j])[ix[j] * axis_.n + iy[j]];
  return v;
}

cplx heis_matrix_coefficient(const MultiIndex& alpha, const MultiIndex& beta, double lam_abs,
                             const Eigen::VectorXd& x, double z) {
  const int d = static_cast<int>(alpha.size());
  if (beta.size() != alpha.size() || x.size() != 2 * d)
    throw std::invalid_argument("heis_matrix_coefficient: dimension mismatch");
  const double s = std::sqrt(lam_abs);
  cplx v(1.0, 0.0);
  for (int j = 0; j < d; ++j) {
    const double xp = x(j), yp = x(d + j);
    Eigen::MatrixXcd I = axis_factors(alpha[j], beta[j], s, xp, yp);
    const double ph = 0.5 * lam_abs * xp * yp;
    v *= I(alpha[j], beta[j]) * cplx(std::cos(ph), std::sin(ph));
  }
  const double ph = lam_abs * z;
  return v * cplx(std::cos(ph), std::sin(ph));
}

cplx matrix_coefficient(const MultiIndex& alpha, const MultiIndex& beta, const DualFrequency& lam,
                        const GroupPoint& p, const HTypeStructure& s) {
  const GroupPoint hp = to_heisenberg(p, lam, s);
  return heis_matrix_coefficient(alpha, beta, lam.rho(), hp.x, hp.z(0));
}

cplx special_hermite(const MultiIndex& alpha, const MultiIndex& beta, double lam_abs,
                     const Eigen::VectorXd& x) {
  const int d = static_cast<int>(alpha.size());
  const double pref = std::pow(2.0 * M_PI, -0.5 * d) * std::pow(lam_abs, 0.5 * d);
  return pref * heis_matrix_coefficient(alpha, beta, lam_abs, x, 0.0);
}

cplx e_k_diag(int k, const DualFrequency& lam, const GroupPoint& p, const HTypeStructure& s) {
  if (k < 0) throw std::invalid_argument("e_k_diag: k >= 0 required");
  const GroupPoint hp = to_heisenberg(p, lam, s);
  cplx sum(0.0, 0.0);
  for (const auto& a : multi_indices_of_order(s.d, k))
    sum += heis_matrix_coefficient(a, a, lam.rho(), hp.x, hp.z(0));
  return sum;
}

double e_k_bound(int k, int d) { return static_cast<double>(multiplicity(k, d)); }

}  // namespace htg
