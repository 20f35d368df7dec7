#include "norms.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "util/parallel.hpp"

namespace htg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// one nesting level of the mixed norm: length-n sequence of inner values with
// uniform cell measure, order in [1, inf]
double level_norm(const std::vector<double>& v, double order, double cell) {
  if (std::isinf(order)) {
    double m = 0;
    for (double x : v) m = std::max(m, x);
    return m;
  }
  double acc = 0;
  for (double x : v) acc += std::pow(x, order);
  return std::pow(cell * acc, 1.0 / order);
}

double conj_exp(double a) {
  if (a == 1.0) return kInf;
  if (std::isinf(a)) return 1.0;
  return a / (a - 1.0);
}

void check_order(double v, const char* name) {
  if (!(v >= 1.0))  // catches NaN too
    throw std::invalid_argument(std::string("mixed norm: order ") + name + " must be >= 1");
}

SpectralGrid dilated_spectral_grid(const SpectralGrid& sg, double lam) {
  const double l2 = lam * lam;
  SpectralGrid out = sg;
  out.lam_min /= l2;
  out.lam_max /= l2;
  for (auto& node : out.nodes) {
    node.lam /= l2;
    node.weight /= std::pow(l2, sg.m);  // Lebesgue d(lambda) in R^m
  }
  return out;
}

SpaceField dilated_field(const SpaceField& f, double lam) {
  SpaceField out;
  out.grid = SpaceGrid{f.grid.d, f.grid.m, Axis{f.grid.xaxis.n, f.grid.xaxis.L * lam},
                       Axis{f.grid.zaxis.n, f.grid.zaxis.L * lam * lam}};
  out.samples = f.samples;  // u0(x / Lam, z / Lam^2) is a verbatim sample copy
  return out;
}

}  // namespace

double mixed_norm(const SpaceTimeField& u, const MixedNormSpec& spec) {
  check_order(spec.p, "p");
  check_order(spec.q, "q");
  check_order(spec.r, "r");
  const SpaceGrid& g = u.grid;
  const std::size_t nx = g.n_x(), nz = g.n_z(), gs = g.size();
  if (u.samples.size() != std::size_t(u.nt) * gs)
    throw std::invalid_argument("mixed_norm: sample count does not match the grid");

  std::vector<double> vert(nz);
  parallel_for(nz, [&](std::size_t zf) {
    std::vector<double> over_t(u.nt);
    std::vector<double> over_x(nx);
    for (int t = 0; t < u.nt; ++t) {
      const cplx* base = u.samples.data() + std::size_t(t) * gs;
      for (std::size_t xf = 0; xf < nx; ++xf) over_x[xf] = std::abs(base[xf * nz + zf]);
      over_t[t] = level_norm(over_x, spec.p, g.xcell());
    }
    vert[zf] = level_norm(over_t, spec.q, u.dt());
  });
  return level_norm(vert, spec.r, g.zcell());
}

AdmissibleResult admissible_check(double p, double q, double r, int d, int m, Equation eq) {
  AdmissibleResult res;
  const double Q = 2.0 * d + 2.0 * m;
  res.sigma = (eq == Equation::schrodinger)
                  ? Q / 2.0 - 2.0 / q - 2.0 * d / p - 2.0 * m / r
                  : (Q - 2.0) / 2.0 - 1.0 / q - 2.0 * d / p - 2.0 * m / r;

  auto fail = [&res](const std::string& msg) { res.diagnostics.push_back(msg); };
  for (auto [v, name] : {std::pair{p, "p"}, {q, "q"}, {r, "r"}})
    if (!(v >= 1.0)) fail(std::string("exponent ") + name + " must lie in [1, inf]");
  if (!(p <= q)) fail("p <= q violated");
  if (!(p <= r)) fail("p <= r violated");
  if (m == 1) {
    if (!std::isinf(r)) fail("r >= 2 + 4/(m-1) unsatisfiable for m = 1 unless r = inf");
  } else if (!(r >= 2.0 + 4.0 / (m - 1))) {
    std::ostringstream os;
    os << "r >= 2 + 4/(m-1) = " << 2.0 + 4.0 / (m - 1) << " violated";
    fail(os.str());
  }
  if (m == 1 && p == 2.0) fail("(m, p) = (1, 2) is excluded");
  if (res.sigma < -1e-12)
    fail(eq == Equation::schrodinger ? "scaling constraint 2/q + 2d/p + 2m/r <= Q/2 violated"
                                     : "scaling constraint 1/q + 2d/p + 2m/r <= (Q-2)/2 violated");
  res.admissible = res.diagnostics.empty();
  return res;
}

double strichartz_ratio(const SpaceField& u0, const MixedNormSpec& spec, Equation eq,
                        double sigma, double T, int nt, const HTypeStructure& s,
                        const SpectralGrid& sg) {
  const auto adm = admissible_check(spec.p, spec.q, spec.r, u0.grid.d, u0.grid.m, eq);
  if (!adm.admissible)
    throw std::invalid_argument("strichartz_ratio: inadmissible exponents: " +
                                adm.diagnostics.front());
  if (sigma < adm.sigma - 1e-9)
    throw std::invalid_argument("strichartz_ratio: sigma below the critical exponent");
  if (u0.l2_norm() == 0.0) throw std::invalid_argument("strichartz_ratio: zero data");

  const auto F = forward(u0, s, sg);
  double num, den;
  if (eq == Equation::schrodinger) {
    num = mixed_norm(schrodinger_propagate(u0, T, nt, s, sg), spec);
    den = sobolev_norm(F, sigma);
  } else {
    WaveData wd;
    wd.u0 = u0;
    num = mixed_norm(wave_propagate(wd, T, nt, s, sg).field, spec);
    den = sobolev_norm(F, sigma + 1.0);  // (u0, v0) in H^{sigma+1} x H^sigma, v0 = 0
  }
  return num / den;
}

std::vector<DilationRow> dilation_scan(const SpaceField& u0, const std::vector<double>& Lams,
                                       const MixedNormSpec& spec, Equation eq, double sigma,
                                       double T, int nt, const HTypeStructure& s,
                                       const SpectralGrid& sg) {
  if (Lams.empty()) throw std::invalid_argument("dilation_scan: empty scale list");
  std::vector<DilationRow> table;
  for (double lam : Lams) {
    if (!(lam > 0)) throw std::invalid_argument("dilation_scan: scales must be positive");
    const auto ul = dilated_field(u0, lam);
    const auto sgl = dilated_spectral_grid(sg, lam);
    const double Tl = (eq == Equation::schrodinger ? lam * lam : lam) * T;

    DilationRow row;
    row.Lam = lam;
    row.l2 = ul.l2_norm();
    const auto F = forward(ul, s, sgl);
    if (eq == Equation::schrodinger) {
      row.mixed = mixed_norm(schrodinger_propagate(ul, Tl, nt, s, sgl), spec);
      row.hsigma = sobolev_norm(F, sigma);
    } else {
      WaveData wd;
      wd.u0 = ul;
      row.mixed = mixed_norm(wave_propagate(wd, Tl, nt, s, sgl).field, spec);
      row.hsigma = sobolev_norm(F, sigma + 1.0);
    }
    row.ratio = row.mixed / row.hsigma;
    table.push_back(row);
  }
  return table;
}

HYReport hausdorff_young_check(const SpaceTimeField& f, double a, double b) {
  if (f.grid.m != 1) throw std::invalid_argument("hausdorff_young_check: m = 1 only");
  const double ap = conj_exp(a), bp = conj_exp(b);
  if (!(a >= 1.0 && b >= 1.0))
    throw std::invalid_argument("hausdorff_young_check: exponents must lie in [1, inf]");
  if (!(b <= std::min(a, ap) + 1e-12))
    throw std::invalid_argument(
        "hausdorff_young_check: need b <= min(a, a') (the Minkowski ordering of the "
        "interpolation endpoints fails otherwise)");

  const SpaceGrid& g = f.grid;
  const std::size_t nx = g.n_x(), nz = g.n_z(), gs = g.size();
  const double hz = g.zaxis.h(), L = g.zaxis.L;
  const std::size_t rows = std::size_t(f.nt) * nx;  // (t, x) pairs
  const double row_cell = f.dt() * g.xcell();

  // inner L^{a'} over (t, x) at fixed z, then outer L^b over z
  std::vector<double> inner_z(nz), inner_lam(nz);
  parallel_for(nz, [&](std::size_t zf) {
    std::vector<double> vals(rows);
    for (int t = 0; t < f.nt; ++t)
      for (std::size_t xf = 0; xf < nx; ++xf)
        vals[std::size_t(t) * nx + xf] = std::abs(f.samples[std::size_t(t) * gs + xf * nz + zf]);
    inner_z[zf] = level_norm(vals, ap, row_cell);
  });

  // F_z f on the DFT comb lambda_j = pi j / L, j in [-nz/2, nz - nz/2)
  parallel_for(nz, [&](std::size_t jf) {
    const int j = int(jf) - int(nz) / 2;
    const double lam = M_PI * j / L;
    std::vector<double> vals(rows);
    std::vector<cplx> phase(nz);
    for (std::size_t i = 0; i < nz; ++i) phase[i] = std::polar(hz, -lam * (-L + i * hz));
    for (int t = 0; t < f.nt; ++t)
      for (std::size_t xf = 0; xf < nx; ++xf) {
        const cplx* base = f.samples.data() + std::size_t(t) * gs + xf * nz;
        cplx acc(0, 0);
        for (std::size_t i = 0; i < nz; ++i) acc += phase[i] * base[i];
        vals[std::size_t(t) * nx + xf] = std::abs(acc);
      }
    inner_lam[jf] = level_norm(vals, ap, row_cell);
  });

  HYReport rep;
  rep.rhs = level_norm(inner_z, b, hz);
  rep.lhs = level_norm(inner_lam, bp, (M_PI / L) / (2.0 * M_PI));  // (2 pi)^{-1} dlambda
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

}  // namespace htg
