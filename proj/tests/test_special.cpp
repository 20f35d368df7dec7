#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "etable.hpp"
#include "quadrature.hpp"
#include "special.hpp"

using namespace htg;

TEST_CASE("hermite_1d basics") {
  CHECK(hermite_1d(0, 0.0) == doctest::Approx(std::pow(M_PI, -0.25)).epsilon(1e-12));
  CHECK(hermite_1d(1, 0.0) == 0.0);
  // normalization of h_25 via 200-node Gauss-Hermite
  const auto& gh = gauss_hermite(200);
  double nrm = 0;
  std::vector<double> h(26);
  for (std::size_t q = 0; q < gh.nodes.size(); ++q) {
    hermite_seq(25, gh.nodes[q], h.data(), true);  // h25 * e^{t^2/2}
    nrm += gh.weights[q] * h[25] * h[25];
  }
  CHECK(nrm == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("hermite gram matrix k <= 32") {
  const auto& gh = gauss_hermite(200);
  const int N = 32;
  std::vector<std::vector<double>> vals(gh.nodes.size(), std::vector<double>(N + 1));
  for (std::size_t q = 0; q < gh.nodes.size(); ++q)
    hermite_seq(N, gh.nodes[q], vals[q].data(), true);
  double worst = 0;
  for (int j = 0; j <= N; ++j)
    for (int k = j; k <= N; ++k) {
      double g = 0;
      for (std::size_t q = 0; q < gh.nodes.size(); ++q)
        g += gh.weights[q] * vals[q][j] * vals[q][k];
      worst = std::max(worst, std::abs(g - (j == k ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("multi_hermite: value, orthonormality, eigenrelation") {
  CHECK(multi_hermite({0}, 1.0, Eigen::VectorXd::Zero(1)) ==
        doctest::Approx(std::pow(M_PI, -0.25)));

  // orthonormality d=2, lambda=2, |alpha| <= 6 by tensor Gauss-Hermite
  const double lam = 2.0, s = std::sqrt(lam);
  const auto& gh = gauss_hermite(80);
  auto idx = multi_indices_up_to(2, 6);
  double worst = 0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i; j < idx.size(); ++j) {
      double g = 0;
      for (std::size_t q1 = 0; q1 < gh.nodes.size(); ++q1)
        for (std::size_t q2 = 0; q2 < gh.nodes.size(); ++q2) {
          Eigen::VectorXd xi(2);
          xi << gh.nodes[q1] / s, gh.nodes[q2] / s;
          const double e2 = std::exp(gh.nodes[q1] * gh.nodes[q1] + gh.nodes[q2] * gh.nodes[q2]);
          g += gh.weights[q1] * gh.weights[q2] / lam * e2 * multi_hermite(idx[i], lam, xi) *
               multi_hermite(idx[j], lam, xi);
        }
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  CHECK(worst < 1e-10);

  // H(lam) Phi = lam (2|alpha| + d) Phi with 4th-order FD second derivative
  const MultiIndex alpha = {3};
  const double lam2 = 1.5, hstep = 0.01;
  for (double xi0 : {-0.7, 0.2, 1.3}) {
    auto f = [&](double t) {
      return multi_hermite(alpha, lam2, Eigen::VectorXd::Constant(1, t));
    };
    const double d2 = (-f(xi0 - 2 * hstep) + 16 * f(xi0 - hstep) - 30 * f(xi0) +
                       16 * f(xi0 + hstep) - f(xi0 + 2 * hstep)) /
                      (12 * hstep * hstep);
    const double Hf = -d2 + lam2 * lam2 * xi0 * xi0 * f(xi0);
    CHECK(Hf == doctest::Approx(lam2 * (2 * 3 + 1) * f(xi0)).epsilon(1e-6));
  }
}

TEST_CASE("laguerre_fn values") {
  Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  CHECK(laguerre_fn(0, 1.7, zero2) == 1.0);
  Eigen::VectorXd zero4 = Eigen::VectorXd::Zero(4);
  CHECK(laguerre_fn(3, 0.9, zero4) == doctest::Approx(4.0));  // binom(3+1,3)
  Eigen::VectorXd x(2);
  x << 1.0, 1.0;  // |x|^2 = 2
  CHECK(std::abs(laguerre_fn(1, 1.0, x)) < 1e-14);  // L_1^0(1) = 0
}

TEST_CASE("matrix coefficients: identity, bound, gaussian oracle") {
  auto s = heisenberg_structure(1);
  DualFrequency lam(1.0);
  CHECK(std::abs(matrix_coefficient({2}, {2}, lam, GroupPoint::zero(s), s) - 1.0) < 1e-12);
  CHECK(std::abs(matrix_coefficient({2}, {0}, lam, GroupPoint::zero(s), s)) < 1e-12);

  // E_00^1 at (x, y, 0) = e^{-(x^2+y^2)/4}
  for (double x : {-1.5, 0.3, 2.0})
    for (double y : {-0.8, 1.1}) {
      GroupPoint p{Eigen::Vector2d(x, y), Eigen::VectorXd::Zero(1)};
      const cplx E = matrix_coefficient({0}, {0}, lam, p, s);
      CHECK(std::abs(E - std::exp(-(x * x + y * y) / 4)) < 1e-10);
    }

  std::mt19937 rng(23);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int it = 0; it < 200; ++it) {
    GroupPoint p{Eigen::Vector2d(g(rng), g(rng)), Eigen::VectorXd::Constant(1, g(rng))};
    CHECK(std::abs(matrix_coefficient({3}, {1}, DualFrequency(2.2), p, s)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("special hermite: scaling identity and phi_k link") {
  std::mt19937 rng(29);
  std::normal_distribution<double> g(0.0, 1.0);
  const double lam = 2.7;
  for (int it = 0; it < 10; ++it) {
    Eigen::VectorXd x(2);
    x << g(rng), g(rng);
    const cplx lhs = special_hermite({2}, {1}, lam, x);
    const cplx rhs =
        std::sqrt(lam) * special_hermite({2}, {1}, 1.0, Eigen::VectorXd(std::sqrt(lam) * x));
    CHECK(std::abs(lhs - rhs) < 1e-10);  // lambda^{d/2} with d = 1

    // phi_k^lam = (2 pi)^{d/2} lam^{-d/2} sum_{|a|=k} Phi_aa
    for (int k : {0, 1, 3}) {
      cplx sum = 0;
      for (const auto& a : multi_indices_of_order(1, k)) sum += special_hermite(a, a, lam, x);
      sum *= std::sqrt(2 * M_PI / lam);
      CHECK(std::abs(sum - laguerre_fn(k, lam, x)) < 1e-8);
    }
  }
}

TEST_CASE("e_k_diag: multiplicity at origin and laguerre link on H^1") {
  auto s1 = heisenberg_structure(1);
  auto s2 = heisenberg_structure(2);
  DualFrequency lam(1.3);
  CHECK(std::abs(e_k_diag(2, lam, GroupPoint::zero(s2), s2) - 3.0) < 1e-10);
  CHECK(e_k_bound(2, 2) == 3.0);
  CHECK(multiplicity(5, 3) == 21);

  // e_k^lam(x, z) = e^{i lam z} phi_k^lam(x) on H^1 (lambda > 0)
  std::mt19937 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int it = 0; it < 10; ++it) {
    GroupPoint p{Eigen::Vector2d(g(rng), g(rng)), Eigen::VectorXd::Constant(1, g(rng))};
    for (int k : {0, 2, 4}) {
      const cplx lhs = e_k_diag(k, lam, p, s1);
      const cplx rhs =
          std::polar(laguerre_fn(k, lam.rho(), p.x), lam.rho() * p.z(0));
      CHECK(std::abs(lhs - rhs) < 1e-8);
    }
  }
}

TEST_CASE("HeisETable matches pointwise coefficients") {
  Axis ax{16, 4.0};
  const double lam = 1.8;
  HeisETable tab(lam, ax, 4, 4);
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b)
      for (int pair : {0, 37, 200, 255}) {
        const int ix = pair / 16, iy = pair % 16;
        Eigen::VectorXd x(2);
        x << ax.point(ix), ax.point(iy);
        const cplx ref = heis_matrix_coefficient({a}, {b}, lam, x, 0.0);
        CHECK(std::abs(tab.factor(a, b)[pair] - ref) < 1e-12);
      }
}
