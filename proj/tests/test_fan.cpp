#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fan.hpp"
#include "gft.hpp"
#include "quadrature.hpp"
#include "special.hpp"
#include "twisted.hpp"

using namespace htg;

namespace {

// z-modulated Gaussian with lambda mass near lam0 (sigma_lam = 1/sqrt(2 zvar))
SpaceField modulated_gaussian(const SpaceGrid& g, double lam0, double zvar = 9.0) {
  return SpaceField::from_function(g, [=](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    return std::exp(-0.5 * x.squaredNorm() - z.squaredNorm() / (2.0 * zvar)) *
           std::polar(1.0, lam0 * z.sum());
  });
}

double rel_l2(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

// int psi(mu) mu^p e^{i sign mu t} dmu on supp psi by dense Gauss-Legendre
cplx psi_moment(const CutoffSpec& psi, double p, double t = 0.0, int sign = 1, int n = 400) {
  const auto gl = gauss_legendre(n, psi.a, psi.b);
  cplx acc(0, 0);
  for (int i = 0; i < n; ++i)
    acc += gl.weights[i] * psi(gl.nodes[i]) * std::pow(gl.nodes[i], p) *
           std::polar(1.0, sign * gl.nodes[i] * t);
  return acc;
}

}  // namespace

TEST_CASE("CutoffSpec: support, range, weighted moments") {
  const CutoffSpec psi{1.0, 1.9};
  CHECK(psi(1.0) == 0.0);
  CHECK(psi(1.9) == 0.0);
  CHECK(psi(0.3) == 0.0);
  CHECK(psi(2.5) == 0.0);
  CHECK(psi(1.45) == doctest::Approx(1.0).epsilon(1e-15));
  for (double mu : {1.05, 1.2, 1.6, 1.85}) {
    CHECK(psi(mu) > 0.0);
    CHECK(psi(mu) < 1.0);
  }

  // midpoint rule on a compactly supported C^inf function is spectrally
  // accurate, giving an independent reference for the Gauss-Legendre moments
  for (double p : {0.0, 1.0, 3.0}) {
    const int n = 4096;
    const double h = (psi.b - psi.a) / n;
    double ref = 0;
    for (int i = 0; i < n; ++i) {
      const double mu = psi.a + (i + 0.5) * h;
      ref += h * psi(mu) * std::pow(mu, p);
    }
    CHECK(psi.weighted_l1(p) == doctest::Approx(ref).epsilon(1e-12));
  }
}

TEST_CASE("fan_nodes and make_fan_data: mu values, shapes, validation") {
  const auto sg = make_spectral_grid(1, 1, 6, 0.3, 1.6, 8);
  const SpaceGrid grid{1, 1, Axis{8, 4.0}, Axis{8, 6.0}};

  auto nodes = fan_nodes(sg, 3);
  CHECK(nodes.size() == 4 * sg.nodes.size());
  for (const auto& nd : nodes) {
    CHECK(nd.mu == doctest::Approx(sg.nodes[nd.node].lam.norm() * (2.0 * nd.k + 1)));
    CHECK(nd.weight == sg.nodes[nd.node].weight);
  }

  auto fd = make_fan_data(sg, grid, 3);
  CHECK(fd.blocks.size() == 4 * sg.nodes.size());
  for (int k = 0; k <= 3; ++k)
    for (std::size_t w = 0; w < fd.n_nodes(); ++w) {
      CHECK(fd.block(k, w).rows() == 1);  // d = 1: every shell is simple
      CHECK(std::size_t(fd.block(k, w).cols()) == sg.nidx());
      CHECK(fd.mu(k, w) == doctest::Approx(sg.nodes[w].lam.norm() * (2 * k + 1)));
    }
  CHECK(fd.l2_norm() == 0.0);

  // d = 2 shell bookkeeping: multiplicity k+1, offset k(k+1)/2
  for (int k : {0, 1, 2, 5}) {
    CHECK(multiplicity(k, 2) == k + 1);
    CHECK(shell_offset(k, 2) == std::size_t(k * (k + 1) / 2));
    CHECK(shell_offset(k, 1) == std::size_t(k));
  }

  CHECK_THROWS(make_fan_data(sg, grid, -1));
  CHECK_THROWS(make_fan_data(sg, grid, 7));  // K_max > N_max
}

TEST_CASE("integrate_fan: zero data, scalar oracle, polar-rescaled cross-check") {
  const CutoffSpec psi{1.0, 1.9};
  // a lambda grid fine enough that the narrowest shell image of supp psi is
  // fully resolved (k = 1 support [1/3, 1.9/3])
  const auto sg = make_spectral_grid(1, 1, 4, 0.3, 2.0, 300);
  const SpaceGrid grid{1, 1, Axis{8, 4.0}, Axis{8, 6.0}};
  const int K = 1;

  auto zero = make_fan_data(sg, grid, K);
  CHECK(integrate_fan(zero, psi) == cplx(0, 0));

  // identity blocks: <d Sigma_psi, I> = (2 pi)^{-2} sum_k 2 (2k+1)^{-2}
  //   int psi(mu) mu dmu  (polar substitution mu = |lambda| (2k+1))
  auto eye = make_fan_data(sg, grid, K);
  for (int k = 0; k <= K; ++k)
    for (std::size_t w = 0; w < eye.n_nodes(); ++w) eye.block(k, w)(0, k) = 1.0;
  double ref = 0;
  for (int k = 0; k <= K; ++k) ref += std::pow(2.0 * k + 1, -2.0);
  ref *= 2.0 * std::pow(2.0 * M_PI, -2.0) * psi.weighted_l1(1.0, 400);
  const cplx got = integrate_fan(eye, psi);
  CHECK(std::abs(got.imag()) < 1e-14 * std::abs(got.real()));
  CHECK(got.real() == doctest::Approx(ref).epsilon(1e-8));

  // smooth diagonal symbol: Cartesian lambda-grid quadrature (the library
  // path) against the polar-rescaled mu-integral evaluated analytically
  auto theta = [](double mu, double lam) { return std::exp(-0.3 * mu) * (1.0 + 0.2 * lam); };
  auto sym = make_fan_data(sg, grid, K);
  for (int k = 0; k <= K; ++k)
    for (std::size_t w = 0; w < sym.n_nodes(); ++w) {
      const double lam = sym.sg.nodes[w].lam(0);  // signed, d = m = 1
      sym.block(k, w)(0, k) = theta(std::abs(lam) * (2 * k + 1), lam);
    }
  double polar = 0;
  {
    const auto gl = gauss_legendre(400, psi.a, psi.b);
    for (int k = 0; k <= K; ++k)
      for (int om : {1, -1})
        for (int i = 0; i < 400; ++i) {
          const double mu = gl.nodes[i];
          polar += gl.weights[i] * psi(mu) * theta(mu, om * mu / (2 * k + 1)) * mu *
                   std::pow(2.0 * k + 1, -2.0) * std::pow(2.0 * M_PI, -2.0);
        }
  }
  CHECK(integrate_fan(sym, psi).real() == doctest::Approx(polar).epsilon(1e-8));
}

TEST_CASE("fan_inner: hermitian, positive, consistent with l2_norm") {
  const auto sg = make_spectral_grid(1, 1, 4, 0.3, 1.6, 6);
  const SpaceGrid grid{1, 1, Axis{8, 4.0}, Axis{8, 6.0}};
  const CutoffSpec psi{1.0, 1.9};
  std::mt19937 rng(11);
  std::normal_distribution<double> N01;
  auto rand_fan = [&] {
    auto fd = make_fan_data(sg, grid, 3);
    for (auto& blk : fd.blocks)
      for (Eigen::Index j = 0; j < blk.size(); ++j) blk(j) = cplx(N01(rng), N01(rng));
    return fd;
  };
  auto A = rand_fan(), B = rand_fan();

  const cplx ab = fan_inner(A, B, psi), ba = fan_inner(B, A, psi);
  CHECK(std::abs(ab - std::conj(ba)) < 1e-12 * std::abs(ab));
  const cplx aa = fan_inner(A, A, psi);
  CHECK(aa.real() > 0.0);
  CHECK(std::abs(aa.imag()) < 1e-14 * aa.real());
  // psi == 1 overload backs the L^2(d Sigma) norm
  CHECK(A.l2_norm() == doctest::Approx(std::sqrt(fan_inner(A, A).real())).epsilon(1e-12));
}

TEST_CASE("shell_tail_sum: closed forms and partial-sum consistency") {
  // d = m = 1: sum_k (2k+1)^{-2} = pi^2 / 8
  CHECK(shell_tail_sum(-1, 1, 1) == doctest::Approx(M_PI * M_PI / 8.0).epsilon(1e-7));
  // d = 2, m = 1: terms (k+1)/(2k+2)^3 = 1/(8 (k+1)^2), sum = pi^2 / 48
  CHECK(shell_tail_sum(-1, 2, 1) == doctest::Approx(M_PI * M_PI / 48.0).epsilon(1e-7));
  for (int K : {0, 3, 10}) {
    double partial = 0;
    for (int k = 0; k <= K; ++k) partial += std::pow(2.0 * k + 1, -2.0);
    CHECK(shell_tail_sum(K, 1, 1) ==
          doctest::Approx(M_PI * M_PI / 8.0 - partial).epsilon(1e-7));
  }
}

TEST_CASE("kappa_mu: e_k_diag oracle, reality, explicit bound, tail flag") {
  const auto s = heisenberg_structure(1);
  std::vector<GroupPoint> pts;
  for (auto [x1, x2, z] : {std::tuple{0.0, 0.0, 0.0}, {0.4, -0.7, 0.3}, {1.1, 0.2, -0.9}}) {
    GroupPoint p;
    p.x = Eigen::VectorXd::Zero(2);
    p.x << x1, x2;
    p.z = Eigen::VectorXd::Constant(1, z);
    pts.push_back(p);
  }
  const double mu = 1.6;
  const int K = 40;
  auto kv = kappa_mu(mu, pts, s, K);

  for (std::size_t i = 0; i < pts.size(); ++i) {
    // independent oracle: Gauss-Hermite diagonal sums over the same shells
    cplx acc(0, 0);
    for (int k = 0; k <= K; ++k)
      for (int om : {1, -1})
        acc += std::pow(2.0 * k + 1, -2.0) *
               e_k_diag(k, DualFrequency(om * mu / (2 * k + 1)), pts[i], s);
    acc *= mu * std::pow(2.0 * M_PI, -2.0);
    CHECK(std::abs(kv.values[i] - acc) < 1e-12);
    // m = 1: the +-omega terms pair into 2 cos(lambda z) phi_k, so kappa is real
    CHECK(std::abs(kv.values[i].imag()) < 1e-13);
    CHECK(std::abs(kv.values[i]) <= kappa_mu_bound(mu, 1, 1) * (1 + 1e-12) + kv.tail_bound);
  }
  // bound realized: vol(S^0) mu (2 pi)^{-2} * full shell sum
  CHECK(kappa_mu_bound(mu, 1, 1) ==
        doctest::Approx(2.0 * mu * std::pow(2.0 * M_PI, -2.0) * M_PI * M_PI / 8.0)
            .epsilon(1e-8));
  // the shell series decays like 1/k, so the reported tail stays above the
  // warning threshold at any practical K_max; the flag must reflect that
  double vmax = 0;
  for (const cplx& v : kv.values) vmax = std::max(vmax, std::abs(v));
  CHECK(kv.tail_bound > 0.0);
  CHECK(kv.truncation_warning == (kv.tail_bound > 1e-6 * vmax));
  auto kv0 = kappa_mu(mu, pts, s, 0);
  CHECK(kv0.tail_bound > kv.tail_bound);
}

TEST_CASE("spectral_slice: eigenrelation, reconstruction, alternative form") {
  const auto s = heisenberg_structure(1);

  SUBCASE("eigen-residual of P_mu f under the twisted Laplacian") {
    const SpaceGrid grid{1, 1, Axis{56, 5.6}, Axis{28, 10.5}};
    auto f = modulated_gaussian(grid, 1.45);
    auto sl = spectral_slice(f, 1.8, s, 4, true);
    CHECK(sl.eigen_residual >= 0.0);
    CHECK(sl.eigen_residual < 1e-4);
    // residual is off by default
    CHECK(spectral_slice(f, 1.8, s, 4).eigen_residual == -1.0);
  }

  SUBCASE("band reconstruction int P_mu f dmu recovers f") {
    const SpaceGrid grid{1, 1, Axis{28, 5.0}, Axis{28, 10.5}};
    auto f = modulated_gaussian(grid, 1.45);
    auto rec = slice_reconstruct(f, 0.25, 2.65, 56, s, 16);
    CHECK(rel_l2(rec.samples, f.samples) < 1e-3);
  }

  SUBCASE("projector form vs matrix-coefficient form") {
    const SpaceGrid grid{1, 1, Axis{28, 5.0}, Axis{28, 10.5}};
    auto f = modulated_gaussian(grid, 1.45);
    auto sl = spectral_slice(f, 1.8, s, 12);
    auto alt = spectral_slice_alt(f, 1.8, s, 12, 20);
    REQUIRE(sl.field.l2_norm() > 1e-3);
    CHECK(rel_l2(alt.samples, sl.field.samples) < 1e-6);
  }

  SUBCASE("slices at separated mu are near-orthogonal") {
    // the cross term is pure z-box Dirichlet leakage, decaying like
    // 1 / (|Delta lambda| L_z), so it needs a long vertical box
    const SpaceGrid grid{1, 1, Axis{28, 5.0}, Axis{56, 21.0}};
    auto f = modulated_gaussian(grid, 1.45);
    auto s18 = spectral_slice(f, 1.8, s, 8);
    auto cross = spectral_slice(s18.field, 0.7, s, 8);
    auto self = spectral_slice(s18.field, 1.8, s, 8);
    CHECK(cross.field.l2_norm() < 0.1 * self.field.l2_norm());
  }
}

TEST_CASE("kappa_sigma: scalar oracle at the origin, bounds, path agreement") {
  const auto s = heisenberg_structure(1);
  const CutoffSpec psi{1.0, 1.9};
  const int K = 24;

  // at x = 0, z = 0 every e_k collapses to its multiplicity, leaving the
  // scalar integral 2 vol(S^0) (2 pi)^{-2} sum_k (2k+1)^{-2} int psi mu e^{i mu t}
  auto rep = kappa_sigma_rep(psi, s, K, 64);
  GroupPoint origin;
  origin.x = Eigen::VectorXd::Zero(2);
  origin.z = Eigen::VectorXd::Zero(1);
  for (double t : {0.0, 0.7, -1.3}) {
    double shells = 0;
    for (int k = 0; k <= K; ++k) shells += std::pow(2.0 * k + 1, -2.0);
    const cplx ref = 2.0 * std::pow(2.0 * M_PI, -2.0) * shells * psi_moment(psi, 1.0, t);
    CHECK(std::abs(rep.eval(t, origin) - ref) < 1e-8 * std::abs(ref));
  }

  // sampled kernel: built-in polar/Cartesian cross-check must pass, and the
  // sup stays under the explicit L^inf constant
  const SpaceGrid grid{1, 1, Axis{12, 4.0}, Axis{16, 7.0}};
  auto kf = kappa_sigma(psi, grid, 4.0, 12, s, K, 48);
  CHECK(kf.path_discrepancy < 1e-4);
  double sup = 0;
  for (const cplx& v : kf.field.samples) sup = std::max(sup, std::abs(v));
  CHECK(sup > 0.0);
  CHECK(sup <= kf.sup_bound + kf.tail_bound);
  CHECK(kf.sup_bound ==
        doctest::Approx(2.0 * std::pow(2.0 * M_PI, -2.0) * psi.weighted_l1(1.0) * M_PI *
                        M_PI / 8.0)
            .epsilon(1e-8));
}

TEST_CASE("restrict_fan: exact modulation identity, concentration, Nyquist guard") {
  const auto s = heisenberg_structure(1);
  const auto sg = make_spectral_grid(1, 1, 6, 0.3, 1.6, 12);
  const SpaceGrid grid{1, 1, Axis{12, 4.5}, Axis{16, 7.0}};
  const double T = 4.0;
  const int nt = 16;

  auto g = modulated_gaussian(grid, 1.0, 3.0);
  auto u_mod = [&](double mu0) {
    SpaceTimeField u;
    u.T = T;
    u.nt = nt;
    u.grid = grid;
    u.samples.resize(std::size_t(nt) * grid.size());
    for (int i = 0; i < nt; ++i) {
      const cplx ph = std::polar(1.0, mu0 * i * T / nt);
      for (std::size_t j = 0; j < grid.size(); ++j)
        u.samples[std::size_t(i) * grid.size() + j] = ph * g.samples[j];
    }
    return u;
  };

  SUBCASE("u = e^{i mu0 t} g with grid-periodic mu0 restricts exactly") {
    const double mu0 = 2.0 * M_PI * 2.0 / T;  // pi: its interpolant is itself
    auto fd = restrict_fan(u_mod(mu0), sg, 3, s);
    auto F = forward(g, s, sg);
    double worst = 0, scale = 0;
    for (int k = 0; k <= 3; ++k)
      for (std::size_t w = 0; w < fd.n_nodes(); ++w) {
        const double mu = fd.mu(k, w);
        const cplx D = (std::polar(1.0, (mu0 - mu) * T) - 1.0) / (cplx(0, 1) * (mu0 - mu));
        const Eigen::MatrixXcd expect = D * F.blocks[w].row(k);
        worst = std::max(worst, (fd.block(k, w) - expect).cwiseAbs().maxCoeff());
        scale = std::max(scale, expect.cwiseAbs().maxCoeff());
      }
    CHECK(worst < 1e-10 * scale);
  }

  SUBCASE("restriction mass concentrates at fan nodes nearest mu0") {
    const double mu0 = 3.0;
    auto fd = restrict_fan(u_mod(mu0), sg, 3, s);
    double best = -1, best_mu = 0;
    for (int k = 0; k <= 3; ++k)
      for (std::size_t w = 0; w < fd.n_nodes(); ++w) {
        const double nrm = fd.block(k, w).norm();
        if (nrm > best) {
          best = nrm;
          best_mu = fd.mu(k, w);
        }
      }
    CHECK(std::abs(best_mu - mu0) < 0.4);
  }

  SUBCASE("induced mu beyond the time Nyquist band throws") {
    // lam_max (2K+1) = 1.6 * 11 = 17.6 > pi nt / T = 4 pi
    CHECK_THROWS(restrict_fan(u_mod(M_PI), sg, 5, s));
  }
}

TEST_CASE("restrict/extend: pullback isometry is an exact discrete identity") {
  const auto s = heisenberg_structure(1);
  const auto sg = make_spectral_grid(1, 1, 6, 0.3, 1.6, 12);
  const SpaceGrid grid{1, 1, Axis{16, 6.0}, Axis{48, 9.0}};
  auto theta = forward(modulated_gaussian(grid, 1.0, 3.0), s, sg);

  // Theta = theta o pr: constant in mu along the fan; with K_max = N_max the
  // shells tile the index set, so ||Theta||_{L^2(d Sigma)} = ||theta||_2
  auto fd = make_fan_data(sg, grid, sg.N_max);
  for (int k = 0; k <= sg.N_max; ++k)
    for (std::size_t w = 0; w < fd.n_nodes(); ++w)
      fd.block(k, w) = theta.blocks[w].row(k);
  CHECK(fd.l2_norm() == doctest::Approx(plancherel_norm(theta)).epsilon(1e-12));
}

TEST_CASE("extend_fan: zero data, adjointness against restrict_fan") {
  const auto s = heisenberg_structure(1);
  const auto sg = make_spectral_grid(1, 1, 6, 0.3, 1.6, 12);
  const SpaceGrid grid{1, 1, Axis{12, 4.5}, Axis{16, 7.0}};
  const CutoffSpec psi{1.0, 1.9};
  const double T = 4.0;
  const int nt = 16;

  auto zero = make_fan_data(sg, grid, 3);
  auto uz = extend_fan(zero, psi, T, nt, s);
  for (const cplx& v : uz.samples) CHECK(v == cplx(0, 0));

  // random Theta, smooth time-periodic f
  std::mt19937 rng(23);
  std::normal_distribution<double> N01;
  auto Theta = make_fan_data(sg, grid, 3);
  for (auto& blk : Theta.blocks)
    for (Eigen::Index j = 0; j < blk.size(); ++j) blk(j) = cplx(N01(rng), N01(rng));

  auto g = modulated_gaussian(grid, 1.0, 3.0);
  auto tau = [&](double t) {
    return cplx(0.3, 0.0) + std::cos(M_PI * t / 2.0) +
           cplx(0, 0.5) * std::sin(M_PI * t) + 0.4 * std::polar(1.0, -M_PI * t / 2.0);
  };
  SpaceTimeField f;
  f.T = T;
  f.nt = nt;
  f.grid = grid;
  f.samples.resize(std::size_t(nt) * grid.size());
  for (int i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < grid.size(); ++j)
      f.samples[std::size_t(i) * grid.size() + j] = tau(i * T / nt) * g.samples[j];

  // <E Theta, f>: E Theta is a trig polynomial in t with frequencies inside
  // supp psi, so composite Simpson on an oversampled [0, T] grid integrates
  // the time pairing to well below the target tolerance (f is entire in t)
  const int nfine = 1024;  // covers [0, 2T); samples 0..nfine/2 give [0, T]
  auto fine = extend_fan(Theta, psi, 2.0 * T, nfine, s);
  const double hfine = 2.0 * T / nfine;
  cplx s1(0, 0);
  for (int i = 0; i <= nfine / 2; ++i) {
    const double w = (i == 0 || i == nfine / 2) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    cplx space(0, 0);
    const std::size_t base = std::size_t(i) * grid.size();
    for (std::size_t j = 0; j < grid.size(); ++j)
      space += std::conj(fine.samples[base + j]) * tau(i * hfine) * g.samples[j];
    s1 += (w * hfine / 3.0) * space * grid.cell();
  }

  const cplx s2 = fan_inner(Theta, restrict_fan(f, sg, 3, s), psi);

  // scale by the Cauchy-Schwarz product of the two sides
  double nET = 0, nf = 0;
  auto coarse = extend_fan(Theta, psi, T, nt, s);
  for (const cplx& v : coarse.samples) nET += std::norm(v);
  for (const cplx& v : f.samples) nf += std::norm(v);
  const double scale =
      std::sqrt(nET * grid.cell() * T / nt) * std::sqrt(nf * grid.cell() * T / nt);
  CHECK(std::abs(s1 - s2) < 1e-5 * scale);
}

TEST_CASE("tt_star_check: three realizations of R* R agree") {
  const auto s = heisenberg_structure(1);
  const SpaceGrid grid{1, 1, Axis{20, 5.5}, Axis{24, 9.0}};
  const double T = 4.0;
  const int nt = 32;
  const double lam0 = 1.45, mu0 = M_PI / 2;  // time-periodic modulation

  SpaceTimeField f;
  f.T = T;
  f.nt = nt;
  f.grid = grid;
  f.samples.resize(std::size_t(nt) * grid.size());
  for (int i = 0; i < nt; ++i) {
    const double t = f.time(i);
    const cplx amp = std::exp(-24.0 * std::pow(t / T - 0.5, 2)) * std::polar(1.0, mu0 * t);
    std::size_t base = std::size_t(i) * grid.size();
    for (std::size_t xf = 0; xf < grid.n_x(); ++xf) {
      const double gx = std::exp(-0.5 * grid.xpoint(xf).squaredNorm());
      for (std::size_t zf = 0; zf < grid.n_z(); ++zf) {
        const double z = grid.zpoint(zf)(0);
        f.samples[base + xf * grid.n_z() + zf] =
            amp * gx * std::exp(-z * z / 6.0) * std::polar(1.0, lam0 * z);
      }
    }
  }

  const CutoffSpec psi{1.0, 1.9};
  const auto sg = make_spectral_grid(1, 1, 12, 0.08, 2.0, 96);
  auto rep = tt_star_check(f, psi, sg, 4, s, 48, 1e-3);
  CHECK(rep.ok);
  CHECK(rep.rel_l2_12 < 1e-3);
  CHECK(rep.rel_l2_13 < 1e-3);
  CHECK(rep.rel_l2_23 < 1e-3);
  CHECK(rep.extend_restrict.samples.size() == f.samples.size());
  CHECK(rep.worst_index < f.samples.size());
}

TEST_CASE("wave kernels: conjugate symmetry, origin oracle, path agreement") {
  const auto s = heisenberg_structure(1);
  const CutoffSpec psi{1.0, 1.9};
  const int K = 24;

  auto plus = wave_kernel_rep(psi, +1, s, K, 64);
  auto minus = wave_kernel_rep(psi, -1, s, K, 64);

  GroupPoint p;
  p.x = Eigen::VectorXd::Zero(2);
  p.x << 0.5, -0.3;
  p.z = Eigen::VectorXd::Constant(1, 0.4);
  for (double t : {0.0, 0.6, -1.1}) {
    const cplx vp = plus.eval(t, p);
    // kappa_{Sigma -}(t) = kappa_{Sigma +}(-t) = conj(kappa_{Sigma +}(t))
    CHECK(std::abs(minus.eval(t, p) - plus.eval(-t, p)) < 1e-12 * std::abs(vp));
    CHECK(std::abs(std::conj(vp) - plus.eval(-t, p)) < 1e-12 * std::abs(vp));
  }

  // origin oracle: 2 vol(S^0) (2 pi)^{-2} sum_k (2k+1)^{-2} int psi mu^3 e^{+- i mu t}
  GroupPoint origin;
  origin.x = Eigen::VectorXd::Zero(2);
  origin.z = Eigen::VectorXd::Zero(1);
  double shells = 0;
  for (int k = 0; k <= K; ++k) shells += std::pow(2.0 * k + 1, -2.0);
  for (double t : {0.0, 0.8}) {
    const cplx refp = 4.0 * std::pow(2.0 * M_PI, -2.0) * shells * psi_moment(psi, 3.0, t, +1);
    const cplx refm = 4.0 * std::pow(2.0 * M_PI, -2.0) * shells * psi_moment(psi, 3.0, t, -1);
    CHECK(std::abs(plus.eval(t, origin) - refp) < 1e-8 * std::abs(refp));
    CHECK(std::abs(minus.eval(t, origin) - refm) < 1e-8 * std::abs(refm));
  }

  // sampled kernel runs its built-in cross-check against the rescaled
  // kappa_{mu^2} form (weight mu); lambda reaches b^2 = 3.61, so the z grid
  // must stay Nyquist-safe for that band
  const SpaceGrid grid{1, 1, Axis{10, 3.5}, Axis{24, 7.0}};
  auto kf = wave_kernel(psi, +1, grid, 4.0, 8, s, K, 48);
  CHECK(kf.path_discrepancy < 1e-4);
  double sup = 0;
  for (const cplx& v : kf.field.samples) sup = std::max(sup, std::abs(v));
  CHECK(sup > 0.0);
  CHECK(sup <= kf.sup_bound + kf.tail_bound);
}
