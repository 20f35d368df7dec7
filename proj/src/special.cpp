#include "special.hpp"

#include <cmath>
#include <stdexcept>

namespace htg {

int multi_order(const MultiIndex& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

namespace {
void enumerate_order(int d, int k, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (d == 1) {
    cur.push_back(k);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= k; ++v) {
    cur.push_back(v);
    enumerate_order(d - 1, k - v, cur, out);
    cur.pop_back();
  }
}
}  // namespace

std::vector<MultiIndex> multi_indices_of_order(int d, int k) {
  std::vector<MultiIndex> out;
  MultiIndex cur;
  enumerate_order(d, k, cur, out);
  return out;
}

std::vector<MultiIndex> multi_indices_up_to(int d, int N) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= N; ++k) {
    auto blk = multi_indices_of_order(d, k);
    out.insert(out.end(), blk.begin(), blk.end());
  }
  return out;
}

std::int64_t multiplicity(int k, int d) {
  std::int64_t r = 1;
  for (int i = 1; i <= d - 1; ++i) r = r * (k + i) / i;
  return r;
}

void hermite_seq(int n, double t, double* out, bool scaled) {
  const double h0 = std::pow(M_PI, -0.25) * (scaled ? 1.0 : std::exp(-0.5 * t * t));
  out[0] = h0;
  if (n == 0) return;
  out[1] = t * std::sqrt(2.0) * h0;
  for (int k = 1; k < n; ++k)
    out[k + 1] = t * std::sqrt(2.0 / (k + 1)) * out[k] - std::sqrt(k / (k + 1.0)) * out[k - 1];
}

double hermite_1d(int k, double t) {
  if (k < 0) throw std::invalid_argument("hermite_1d: k >= 0 required");
  std::vector<double> buf(k + 1);
  hermite_seq(k, t, buf.data());
  return buf[k];
}

double multi_hermite(const MultiIndex& alpha, double lam_abs, const Eigen::VectorXd& xi) {
  if (!(lam_abs > 0)) throw std::invalid_argument("multi_hermite: lambda > 0 required");
  const int d = static_cast<int>(alpha.size());
  if (xi.size() != d) throw std::invalid_argument("multi_hermite: dimension mismatch");
  const double s = std::sqrt(lam_abs);
  double v = std::pow(lam_abs, 0.25 * d);
  for (int j = 0; j < d; ++j) v *= hermite_1d(alpha[j], s * xi(j));
  return v;
}

double laguerre_poly(int k, int a, double t) {
  if (k < 0) throw std::invalid_argument("laguerre_poly: k >= 0 required");
  double Lm1 = 0.0, L = 1.0;  // L_0^a = 1
  for (int i = 0; i < k; ++i) {
    const double Lp1 = ((2 * i + a + 1 - t) * L - (i + a) * Lm1) / (i + 1);
    Lm1 = L;
    L = Lp1;
  }
  return L;
}

double laguerre_fn(int k, double lam_abs, const Eigen::VectorXd& x) {
  if (!(lam_abs > 0)) throw std::invalid_argument("laguerre_fn: lambda > 0 required");
  if (x.size() % 2 != 0) throw std::invalid_argument("laguerre_fn: x must lie in R^{2d}");
  const int d = static_cast<int>(x.size()) / 2;
  const double t = 0.5 * lam_abs * x.squaredNorm();
  return laguerre_poly(k, d - 1, t) * std::exp(-0.5 * t);
}

}  // namespace htg
