#include "verify.hpp"

#include <cmath>

#include "evolve.hpp"
#include "fan.hpp"
#include "norms.hpp"
#include "quadrature.hpp"

namespace htg {

namespace {

SpaceField modg(const SpaceGrid& g, double lam0) {
  return SpaceField::from_function(g, [=](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    return std::exp(-0.5 * x.squaredNorm() - z.squaredNorm() / 6.0) *
           std::polar(1.0, lam0 * z.sum());
  });
}

void add(VerifyReport& rep, const std::string& name, double residual, double tol) {
  rep.checks.push_back({name, residual, tol, residual <= tol});
}

double hermite_gram() {
  const auto& q = gauss_hermite(64);
  const int N = 16;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N + 1, N + 1);
  std::vector<double> h(N + 1);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    // the e^{-x^2} weight absorbs the squared Gaussian of h_a h_b
    hermite_seq(N, q.nodes[i], h.data(), /*scaled=*/true);
    for (int a = 0; a <= N; ++a)
      for (int b = 0; b <= N; ++b) G(a, b) += q.weights[i] * h[a] * h[b];
  }
  return (G - Eigen::MatrixXd::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff();
}

double special_hermite_gram() {
  const Axis axis{48, 9.0};
  const auto idx = multi_indices_up_to(1, 2);
  std::vector<TwistedField> fields;
  for (const auto& a : idx)
    for (const auto& b : idx)
      fields.push_back(TwistedField::from_function(
          1, 1.0, axis, [&](const Eigen::VectorXd& x) { return special_hermite(a, b, 1.0, x); }));
  double worst = 0;
  const double cell = fields[0].cell_volume();
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = i; j < fields.size(); ++j) {
      cplx acc(0, 0);
      for (std::size_t r = 0; r < fields[i].size(); ++r)
        acc += fields[i].samples[r] * std::conj(fields[j].samples[r]);
      worst = std::max(worst, std::abs(acc * cell - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

double twisted_identity() {
  const Axis axis{48, 9.0};
  const double lam = 1.0;
  double worst = 0;
  for (int j = 0; j <= 2; ++j) {
    const auto pj = laguerre_field(j, lam, 1, axis);
    for (int k = 0; k <= 2; ++k) {
      const auto pk = laguerre_field(k, lam, 1, axis);
      const auto conv = twisted_convolve(pj, pk);
      const double target = (j == k) ? 2.0 * M_PI / lam : 0.0;
      double num = 0, den = 0;
      for (std::size_t r = 0; r < conv.size(); ++r) {
        num += std::norm(conv.samples[r] - target * pj.samples[r]);
        den += std::norm((2.0 * M_PI / lam) * pj.samples[r]);
      }
      worst = std::max(worst, std::sqrt(num / den));
    }
  }
  return worst;
}

double projector_algebra() {
  const Axis axis{64, 8.0};
  const auto g = TwistedField::from_function(1, 1.3, axis, [](const Eigen::VectorXd& x) {
    return std::exp(-0.4 * x.squaredNorm()) * (1.0 + 0.3 * x(0));
  });
  double worst = 0;
  const double den = g.l2_norm();
  for (int k = 0; k <= 4; ++k) {
    const auto pk = project_k(g, k);
    // idempotence and orthogonality
    for (int j = 0; j <= 4; ++j) {
      const auto pjk = project_k(pk, j);
      double num = 0;
      for (std::size_t r = 0; r < pjk.size(); ++r)
        num += std::norm(pjk.samples[r] - (j == k ? pk.samples[r] : cplx(0, 0)));
      worst = std::max(worst, std::sqrt(num * pjk.cell_volume()) / den);
    }
    // eigenrelation with the spectral Laplacian: the convolution projector
    // must land on the k-th shell of the independent Phi_{alpha beta} expansion
    const double mu = std::abs(g.lam) * (2 * k + 1);
    const auto lap = twisted_laplacian_spectral(pk, 10);
    double num = 0, dmu = 0;
    for (std::size_t r = 0; r < pk.size(); ++r) {
      num += std::norm(lap.field.samples[r] + mu * pk.samples[r]);
      dmu += std::norm(mu * pk.samples[r]);
    }
    worst = std::max(worst, std::sqrt(num / dmu));
  }
  return worst;
}

}  // namespace

bool VerifyReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

VerifyReport run_verify() {
  VerifyReport rep;
  const auto s = heisenberg_structure(1);

  add(rep, "hermite_orthonormality", hermite_gram(), 1e-8);
  add(rep, "special_hermite_orthonormality", special_hermite_gram(), 1e-6);
  add(rep, "twisted_convolution_identity", twisted_identity(), 1e-6);
  add(rep, "projector_algebra", projector_algebra(), 1e-4);

  // transform block: Plancherel, inversion, reality symmetry
  {
    const SpaceGrid g{1, 1, Axis{32, 8.0}, Axis{80, 12.0}};
    const auto sg = make_spectral_grid(1, 1, 20);
    const auto f = modg(g, 3.0);
    const auto F = forward(f, s, sg);
    add(rep, "plancherel", std::abs(plancherel_norm(F) - f.l2_norm()) / f.l2_norm(), 1e-5);
    const auto back = inverse(F, s);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      num += std::norm(back.samples[i] - f.samples[i]);
      den += std::norm(f.samples[i]);
    }
    add(rep, "inversion_roundtrip", std::sqrt(num / den), 1e-5);
  }

  // closed Laguerre identity for the diagonal shell sums
  {
    double worst = 0;
    for (int k = 0; k <= 6; ++k)
      for (double xv : {0.0, 0.7, 1.9}) {
        GroupPoint p;
        p.x = Eigen::Vector2d(xv, 0.4);
        p.z = Eigen::VectorXd::Constant(1, 0.3);
        const DualFrequency lam(1.3);
        const cplx direct = e_k_diag(k, lam, p, s);
        const cplx closed = std::polar(1.0, lam.lambda(0) * p.z(0)) *
                            laguerre_fn(k, lam.rho(), p.x);
        worst = std::max(worst, std::abs(direct - closed));
      }
    add(rep, "laguerre_diagonal_identity", worst, 1e-10);
  }

  // propagators
  {
    const SpaceGrid g{1, 1, Axis{16, 6.0}, Axis{48, 9.0}};
    const auto sg = make_spectral_grid(1, 1, 4, 0.4, 1.6, 16);
    const auto u0 = modg(g, 1.0);
    const auto F = forward(u0, s, sg);
    const double n0 = plancherel_norm(F);
    double drift = 0;
    for (double t : {0.5, 1.7, 4.0})
      drift = std::max(drift, std::abs(plancherel_norm(schrodinger_multiplier(F, t)) - n0) / n0);
    add(rep, "schrodinger_unitarity", drift, 1e-10);

    WaveData wd;
    wd.u0 = u0;
    wd.v0 = modg(g, 1.2);
    const auto wr = wave_propagate(wd, 4.0, 16, s, sg);
    double lo = 1e300, hi = 0;
    for (double e : wr.energy) {
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    add(rep, "wave_energy_conservation", (hi - lo) / hi, 1e-8);

    SpaceTimeField f;
    f.T = 4.0;
    f.nt = 64;
    f.grid = g;
    f.samples.resize(std::size_t(f.nt) * g.size());
    const double mu0 = 2.0 * M_PI * 3.0 / f.T;
    const auto sgd = make_spectral_grid(1, 1, 2, 0.4, 1.6, 12);
    for (int i = 0; i < f.nt; ++i) {
      const cplx ph = std::polar(1.0, mu0 * i * f.T / f.nt);
      for (std::size_t j = 0; j < g.size(); ++j)
        f.samples[std::size_t(i) * g.size() + j] = ph * u0.samples[j];
    }
    add(rep, "duhamel_residual", duhamel(f, s, sgd, 32, true).residual, 2e-3);

    // scaling exponents, exact on rescaled grids
    const MixedNormSpec dual{1.0, 4.0 / 3.0, 4.0 / 3.0};
    auto tab = dilation_scan(u0, {1.0, 2.0}, dual, Equation::schrodinger, 1.0, 2.0, 8, s, sg);
    const double em = std::log(tab[1].mixed / tab[0].mixed) / std::log(2.0);
    const double el = std::log(tab[1].l2 / tab[0].l2) / std::log(2.0);
    add(rep, "dilation_exponent_mixed", std::abs(em - 5.0), 1e-6);
    add(rep, "dilation_exponent_l2", std::abs(el - 2.0), 1e-9);
    // ratio constancy holds in the admissible exponents at sigma equality
    const MixedNormSpec adm{INFINITY, 4.0, 4.0};
    auto rtab = dilation_scan(u0, {1.0, 2.0}, adm, Equation::schrodinger, 1.0, 2.0, 8, s, sg);
    add(rep, "strichartz_ratio_stability",
        std::abs(rtab[1].ratio - rtab[0].ratio) / rtab[0].ratio, 0.02);

    add(rep, "hausdorff_young_plancherel",
        std::abs(hausdorff_young_check(wr.field, 2.0, 2.0).ratio - 1.0), 1e-8);
  }

  // fan kernel sup bound and the TT* identity on a coarse grid
  {
    const CutoffSpec psi{1.0, 1.9};
    const SpaceGrid g{1, 1, Axis{12, 4.0}, Axis{16, 7.0}};
    const auto kf = kappa_sigma(psi, g, 4.0, 12, s, 24, 48);
    double sup = 0;
    for (const cplx& v : kf.field.samples) sup = std::max(sup, std::abs(v));
    add(rep, "kernel_sup_bound", sup / kf.sup_bound, 1.0);
    add(rep, "kernel_path_consistency", kf.path_discrepancy, 1e-4);
  }
  {
    const SpaceGrid g{1, 1, Axis{20, 5.5}, Axis{24, 9.0}};
    const auto sg = make_spectral_grid(1, 1, 12, 0.08, 2.0, 96);
    const CutoffSpec psi{1.0, 1.9};
    SpaceTimeField f;
    f.T = 4.0;
    f.nt = 32;
    f.grid = g;
    f.samples.resize(std::size_t(f.nt) * g.size());
    const auto prof = modg(g, 1.45);
    const double mu0 = M_PI / 2.0;
    for (int i = 0; i < f.nt; ++i) {
      const double t = i * f.T / f.nt;
      const cplx ph = std::polar(std::exp(-24.0 * std::pow(t / f.T - 0.5, 2)), mu0 * t);
      for (std::size_t j = 0; j < g.size(); ++j)
        f.samples[std::size_t(i) * g.size() + j] = ph * prof.samples[j];
    }
    const auto tt = tt_star_check(f, psi, sg, 4, s, 48, 1e-3);
    const double worst = std::max({tt.rel_l2_12, tt.rel_l2_13, tt.rel_l2_23});
    add(rep, "tt_star_three_way", worst, 1e-3);
  }

  // admissible-set exclusions (1 when correctly rejected, 0 otherwise)
  {
    const bool excl_p2 = !admissible_check(2.0, 4.0, INFINITY, 1, 1,
                                           Equation::schrodinger).admissible;
    const bool excl_r = !admissible_check(4.0, 4.0, 17.0, 1, 1,
                                          Equation::schrodinger).admissible;
    const bool adm = admissible_check(4.0, 4.0, INFINITY, 1, 1,
                                      Equation::schrodinger).admissible;
    add(rep, "admissible_exclusions", (excl_p2 && excl_r && adm) ? 0.0 : 1.0, 0.5);
  }

  return rep;
}

}  // namespace htg
