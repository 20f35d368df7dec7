#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "quadrature.hpp"
#include "twisted.hpp"

using namespace htg;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

TwistedField gaussian_field(double lam, const Axis& ax, double a = 0.5) {
  return TwistedField::from_function(
      1, lam, ax, [a](const Eigen::VectorXd& x) { return cplx(std::exp(-a * x.squaredNorm()), 0.0); });
}

double rel_l2_diff(const TwistedField& u, const TwistedField& v) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < u.samples.size(); ++i) {
    num += std::norm(u.samples[i] - v.samples[i]);
    den += std::norm(v.samples[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("TwistedField basics") {
  Axis ax{64, 8.0};
  auto g = gaussian_field(1.0, ax);  // e^{-|x|^2/2}, ||.||_2^2 = pi
  CHECK(g.l2_norm() == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
  CHECK(g.lp_norm(2.0) == doctest::Approx(g.l2_norm()).epsilon(1e-12));
  CHECK(g.lp_norm(kInf) == doctest::Approx(1.0));
  CHECK(g.boundary_ratio() < 1e-8);
  CHECK(g.point(0)(0) == doctest::Approx(-8.0));
  CHECK(g.cell_volume() == doctest::Approx(0.0625));
}

TEST_CASE("twisted_convolve: zero, laguerre identity, dense oracle") {
  // g x_lam 0 = 0
  Axis ax{48, 8.0};
  auto g = gaussian_field(1.0, ax);
  auto zf = g;
  for (auto& v : zf.samples) v = 0;
  auto gz = twisted_convolve(g, zf);
  for (const auto& v : gz.samples) CHECK(std::abs(v) == 0.0);

  // phi_j x_lam phi_k = (2 pi / lam)^d delta_jk phi_j, j,k <= 4, lam = 1
  {
    Axis big{96, 12.0};
    const double lam = 1.0;
    std::vector<TwistedField> phi;
    for (int k = 0; k <= 4; ++k) phi.push_back(laguerre_field(k, lam, 1, big));
    for (int j = 0; j <= 4; ++j)
      for (int k = j; k <= 4; ++k) {
        auto c = twisted_convolve(phi[j], phi[k]);
        double num = 0, den = 0;
        for (std::size_t i = 0; i < c.samples.size(); ++i) {
          const cplx target = (j == k) ? 2.0 * M_PI / lam * phi[j].samples[i] : cplx(0, 0);
          num += std::norm(c.samples[i] - target);
          den += std::norm(2.0 * M_PI / lam * phi[j].samples[i]);
        }
        CHECK(std::sqrt(num / den) < 1e-6);
      }
  }

  // one lam = 4 pair on a finer box
  {
    Axis big{128, 6.0};
    const double lam = 4.0;
    auto p1 = laguerre_field(1, lam, 1, big);
    auto p2 = laguerre_field(2, lam, 1, big);
    auto c11 = twisted_convolve(p1, p1);
    auto c12 = twisted_convolve(p1, p2);
    double num = 0, den = 0, off = 0;
    for (std::size_t i = 0; i < c11.samples.size(); ++i) {
      num += std::norm(c11.samples[i] - 2.0 * M_PI / lam * p1.samples[i]);
      den += std::norm(2.0 * M_PI / lam * p1.samples[i]);
      off += std::norm(c12.samples[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-6);
    CHECK(std::sqrt(off / den) < 1e-6);
  }

  // Gaussian x Gaussian against a dense double-integral oracle
  {
    const double lam = 1.0, a = 0.5, b = 1.0 / 3.0;
    auto ga = gaussian_field(lam, ax, a);
    auto gb = gaussian_field(lam, ax, b);
    auto c = twisted_convolve(ga, gb);
    auto gl = gauss_legendre(220, -8.0, 8.0);
    for (std::size_t flat : {std::size_t(0) /* corner */, std::size_t(24 * 48 + 24) /* origin */,
                             std::size_t(30 * 48 + 20)}) {
      const Eigen::VectorXd x0 = ga.point(flat);
      cplx oracle(0, 0);
      for (std::size_t q1 = 0; q1 < gl.nodes.size(); ++q1)
        for (std::size_t q2 = 0; q2 < gl.nodes.size(); ++q2) {
          const double wx = gl.nodes[q1], wy = gl.nodes[q2];
          const double dx = x0(0) - wx, dy = x0(1) - wy;
          const double ph = 0.5 * lam * (x0(1) * wx - x0(0) * wy);
          oracle += gl.weights[q1] * gl.weights[q2] * std::exp(-a * (dx * dx + dy * dy)) *
                    std::exp(-b * (wx * wx + wy * wy)) * std::polar(1.0, ph);
        }
      CHECK(std::abs(c.samples[flat] - oracle) < 1e-8);
    }
  }
}

TEST_CASE("project_k: eigenfunctions, orthogonality, completeness") {
  Axis ax{72, 9.0};
  const double lam = 1.0;

  // Lambda_0 phi_0 = phi_0
  auto p0 = laguerre_field(0, lam, 1, ax);
  CHECK(rel_l2_diff(project_k(p0, 0), p0) < 1e-6);

  // Lambda_k picks out the first Hermite index of Phi_{alpha beta}
  auto f10 = TwistedField::from_function(
      1, lam, ax, [&](const Eigen::VectorXd& x) { return special_hermite({1}, {0}, lam, x); });
  auto f01 = TwistedField::from_function(
      1, lam, ax, [&](const Eigen::VectorXd& x) { return special_hermite({0}, {1}, lam, x); });
  CHECK(rel_l2_diff(project_k(f10, 1), f10) < 1e-6);
  CHECK(project_k(f01, 1).l2_norm() < 1e-6);

  // Lambda_k Lambda_j = delta_jk Lambda_j on a Gaussian
  auto g = gaussian_field(lam, ax);
  auto g0 = project_k(g, 0);
  auto g2 = project_k(g, 2);
  CHECK(rel_l2_diff(project_k(g0, 0), g0) < 1e-6);
  CHECK(rel_l2_diff(project_k(g2, 2), g2) < 1e-6);
  CHECK(project_k(g0, 2).l2_norm() / g0.l2_norm() < 1e-6);
  CHECK(project_k(g2, 0).l2_norm() / g2.l2_norm() < 1e-6);

  // completeness: sum_{k<=24} Lambda_k g = g; by bilinearity the partial sum
  // is one convolution against sum_k phi_k.  phi_24 lives out to r ~ 14 and
  // oscillates at ~10 rad per unit, so this check needs a larger, finer box.
  Axis fine{192, 12.0};
  auto gf = gaussian_field(lam, fine);
  auto ker = laguerre_field(0, lam, 1, fine);
  for (int k = 1; k <= 24; ++k) {
    auto pk = laguerre_field(k, lam, 1, fine);
    for (std::size_t i = 0; i < ker.samples.size(); ++i) ker.samples[i] += pk.samples[i];
  }
  auto sum = twisted_convolve(gf, ker);
  const double pref = lam / (2.0 * M_PI);
  for (auto& v : sum.samples) v *= pref;
  CHECK(rel_l2_diff(sum, gf) < 1e-4);
}

TEST_CASE("twisted laplacian: eigenrelation, projector link, fd cross-path") {
  Axis ax{64, 8.0};
  const double lam = 1.3;

  // Delta^lam Phi_{alpha beta} = -|lam| (2|alpha| + d) Phi_{alpha beta}
  for (auto [a, b] : {std::pair<int, int>{2, 1}, {0, 3}}) {
    auto f = TwistedField::from_function(1, lam, ax, [&, a = a, b = b](const Eigen::VectorXd& x) {
      return special_hermite({a}, {b}, lam, x);
    });
    auto res = twisted_laplacian_spectral(f, 6);
    CHECK(res.tail_fraction < 1e-6);
    double num = 0, den = 0;
    const double ev = -lam * (2 * a + 1);
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
      num += std::norm(res.field.samples[i] - ev * f.samples[i]);
      den += std::norm(ev * f.samples[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-6);
  }

  // Delta^lam (Lambda_k g) + |lam| (2k + d) Lambda_k g = 0
  auto g = gaussian_field(lam, ax);
  auto g2 = project_k(g, 2);
  auto lap = twisted_laplacian_spectral(g2, 12);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < g2.samples.size(); ++i) {
    num += std::norm(lap.field.samples[i] + lam * 5.0 * g2.samples[i]);
    den += std::norm(lam * 5.0 * g2.samples[i]);
  }
  CHECK(std::sqrt(num / den) < 1e-5);

  // spectral vs 4th-order finite differences on a Gaussian
  auto sp = twisted_laplacian_spectral(g, 14);
  CHECK(sp.tail_fraction < 1e-6);
  auto fd = twisted_laplacian_fd(g);
  CHECK(rel_l2_diff(fd, sp.field) < 1e-3);

  // negative lambda: conjugate Gaussian data, eigenvalues unchanged
  auto gm = gaussian_field(-lam, ax);
  auto spm = twisted_laplacian_spectral(gm, 14);
  CHECK(spm.tail_fraction < 1e-6);
  CHECK(rel_l2_diff(twisted_laplacian_fd(gm), spm.field) < 1e-3);
}

TEST_CASE("rho_exponent") {
  CHECK(rho_exponent(2.0, 1) == 0.0);
  CHECK(rho_exponent(2.0, 3) == 0.0);
  // d = 1 breakpoint at r = 6: both branches give -1/3
  CHECK(rho_exponent(6.0, 1) == doctest::Approx(-1.0 / 3).epsilon(1e-14));
  CHECK(2.0 * 1 * (0.5 - 1.0 / 6) - 1.0 == doctest::Approx(-1.0 / 3));
  CHECK(rho_exponent(kInf, 1) == doctest::Approx(0.0));
  CHECK(rho_exponent(kInf, 2) == doctest::Approx(1.0));
  CHECK_THROWS(rho_exponent(1.5, 1));
}

TEST_CASE("projector_norm_estimate") {
  // orthogonal projection: ||Lambda_k||_{2->2} = 1
  for (int k : {0, 5}) {
    auto e = projector_norm_estimate(k, 2, 2, 100);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(e.converged);
  }

  // d = 1 kernel-row norm is sqrt(lam / 2 pi) for every k; cross-check the
  // k = 0 case against a dense kernel-row oracle on a grid
  auto ei = projector_norm_estimate(0, 2, kInf, 100);
  CHECK(ei.value == doctest::Approx(std::sqrt(1.0 / (2.0 * M_PI))).epsilon(1e-10));
  CHECK(projector_norm_estimate(7, 2, kInf, 100).value == doctest::Approx(ei.value).epsilon(1e-10));
  {
    Axis ax{96, 10.0};
    auto p0 = laguerre_field(0, 1.0, 1, ax);
    // row L2 norm of K(x, w) = (2 pi)^{-1} lam phi_0(x - w) e^{i...}; the
    // twist is unimodular so sup_x reduces to the phi_0 norm on the grid
    const double row = p0.l2_norm() / (2.0 * M_PI);
    CHECK(row == doctest::Approx(ei.value).epsilon(1e-8));
  }

  // measured 2->6 norms sit under C (2k+1)^{rho(6)/2} with C fitted at k = 4
  const double rho6 = rho_exponent(6.0, 1);
  double C = 0;
  std::vector<double> vals;
  for (int k : {4, 8, 16, 32}) {
    auto e = projector_norm_estimate(k, 2, 6.0, 400);
    CHECK(e.converged);
    vals.push_back(e.value);
    const double c = e.value / std::pow(2.0 * k + 1, 0.5 * rho6);
    if (C == 0) C = c;
    CHECK(c <= C * (1 + 1e-6));
  }
  // fitted log-log slope <= rho(6)/2 + 0.1
  const double slope = std::log(vals.back() / vals.front()) / std::log(65.0 / 9.0);
  CHECK(slope <= 0.5 * rho6 + 0.1);

  // homogeneity: ||Lambda_k^lam|| = lam^{d (1/p - 1/r)} ||Lambda_k^1||
  auto n1 = projector_norm_estimate(2, 2, 6.0, 400, 1.0);
  auto n4 = projector_norm_estimate(2, 2, 6.0, 400, 4.0);
  CHECK(n4.value / n1.value == doctest::Approx(std::pow(4.0, 1.0 / 2 - 1.0 / 6)).epsilon(1e-6));

  // p < 2: named-witness lower bound, below the 2->2-interpolated ceiling
  auto w = projector_norm_estimate(3, 1, 2.0, 100);
  CHECK(w.lower_bound_only);
  CHECK(w.value > 0);
  CHECK(w.method.find("witness") != std::string::npos);

  CHECK_THROWS(projector_norm_estimate(2, 2.5, 6.0, 100));
  CHECK_THROWS(projector_norm_estimate(2, 2.0, 1.0, 100));
}

TEST_CASE("series_partial_sum") {
  // (d, m, p, r) = (1, 1, 1, 1): summand (2k+1)^{-2}, S_inf = pi^2 / 8
  auto s3 = series_partial_sum(1, 1, 1, 1, 1000);
  auto s4 = series_partial_sum(1, 1, 1, 1, 10000);
  REQUIRE(s3.admissible);
  CHECK(std::abs(s4.S_K - s3.S_K) / s4.S_K < 1e-3);
  CHECK(s4.S_K < M_PI * M_PI / 8);
  CHECK(s3.S_K + s3.tail_bound >= M_PI * M_PI / 8);  // integral-comparison majorant
  // monotone partial sums
  for (std::size_t i = 1; i < s4.checkpoints.size(); ++i)
    CHECK(s4.checkpoints[i] > s4.checkpoints[i - 1]);
  CHECK(s4.checkpoints.back() <= s4.S_K);

  // m (1/r - 1/r') >= 2m/(m+1) at the endpoint r = 2(m+1)/(m+3)
  for (int m : {1, 3, 5}) {
    const double r = 2.0 * (m + 1) / (m + 3);
    CHECK(m * (2.0 / r - 1.0) >= 2.0 * m / (m + 1) - 1e-12);
  }

  // exclusions with diagnostics
  auto bad = series_partial_sum(2, 1, 1, 1, 10);
  CHECK_FALSE(bad.admissible);
  CHECK(bad.diagnostic.find("(m, p) = (1, 2)") != std::string::npos);
  CHECK_FALSE(series_partial_sum(1, 1.5, 1, 1, 10).admissible);  // r too large for m = 1
  CHECK_FALSE(series_partial_sum(0.5, 1, 1, 1, 10).admissible);
  CHECK_FALSE(series_partial_sum(1, 1, 1, 1, 10, true).admissible);  // measured needs p = 2

  // m = 3 admits r up to 4/3 and the measured p = 2 path
  auto m3 = series_partial_sum(2, 4.0 / 3, 1, 3, 1000, true);
  CHECK(m3.admissible);
  CHECK(std::isfinite(m3.tail_bound));
}
