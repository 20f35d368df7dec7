#include "twisted.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "quadrature.hpp"
#include "util/fft.hpp"
#include "util/parallel.hpp"

namespace htg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void decode(std::size_t flat, int n, int twod, int* idx) {
  for (int a = twod - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n);
    flat /= n;
  }
}

std::size_t grid_size(int n, int twod) {
  std::size_t s = 1;
  for (int a = 0; a < twod; ++a) s *= n;
  return s;
}

}  // namespace

TwistedField TwistedField::from_function(int d, double lam, const Axis& axis,
                                         const std::function<cplx(const Eigen::VectorXd&)>& f) {
  TwistedField out;
  out.d = d;
  out.lam = lam;
  out.axis = axis;
  out.samples.resize(grid_size(axis.n, 2 * d));
  parallel_for(out.samples.size(), [&](std::size_t i) { out.samples[i] = f(out.point(i)); });
  return out;
}

double TwistedField::cell_volume() const { return std::pow(axis.h(), 2 * d); }

Eigen::VectorXd TwistedField::point(std::size_t flat) const {
  const int twod = 2 * d;
  std::vector<int> idx(twod);
  decode(flat, axis.n, twod, idx.data());
  Eigen::VectorXd x(twod);
  for (int a = 0; a < twod; ++a) x(a) = axis.point(idx[a]);
  return x;
}

double TwistedField::l2_norm() const {
  double s = 0;
  for (const cplx& v : samples) s += std::norm(v);
  return std::sqrt(cell_volume() * s);
}

double TwistedField::lp_norm(double p) const {
  if (std::isinf(p)) {
    double m = 0;
    for (const cplx& v : samples) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(p >= 1)) throw std::invalid_argument("lp_norm: p >= 1 required");
  double s = 0;
  for (const cplx& v : samples) s += std::pow(std::abs(v), p);
  return std::pow(cell_volume() * s, 1.0 / p);
}

double TwistedField::boundary_ratio() const {
  const int twod = 2 * d, n = axis.n;
  std::vector<int> idx(twod);
  double all = 0, bnd = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = std::abs(samples[i]);
    all = std::max(all, v);
    decode(i, n, twod, idx.data());
    for (int a = 0; a < twod; ++a)
      if (idx[a] == 0 || idx[a] == n - 1) {
        bnd = std::max(bnd, v);
        break;
      }
  }
  return all > 0 ? bnd / all : 0.0;
}

TwistedField twisted_convolve(const TwistedField& g, const TwistedField& h) {
  if (g.d != h.d || g.axis.n != h.axis.n || g.axis.L != h.axis.L ||
      std::abs(g.lam - h.lam) > 1e-14)
    throw std::invalid_argument("twisted_convolve: grid or lambda mismatch");
  const int n = g.axis.n, d = g.d, twod = 2 * d, half = n / 2;
  if (n % 2 != 0) throw std::invalid_argument("twisted_convolve: even n required");
  const std::size_t npts = g.samples.size();

  std::vector<int> coords(npts * twod);
  for (std::size_t i = 0; i < npts; ++i) decode(i, n, twod, &coords[i * twod]);
  // phase factor table: P[a*n+b] = e^{i lam p_a p_b / 2}; the full twist
  // e^{i lam Im(x . conj(w)) / 2} is a product of d lookups and d conjugates
  std::vector<cplx> P(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      P[a * n + b] = std::polar(1.0, 0.5 * g.lam * g.axis.point(a) * g.axis.point(b));

  TwistedField out = g;
  const double cell = g.cell_volume();
  parallel_for(npts, [&](std::size_t i) {
    const int* ci = &coords[i * twod];
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < npts; ++j) {
      const int* cj = &coords[j * twod];
      std::size_t flat = 0;
      bool inside = true;
      for (int a = 0; a < twod; ++a) {
        const int t = ci[a] - cj[a] + half;  // index of (x - w) on the grid
        if (t < 0 || t >= n) {
          inside = false;
          break;
        }
        flat = flat * n + t;
      }
      if (!inside) continue;
      cplx ph(1.0, 0.0);
      for (int jj = 0; jj < d; ++jj)
        ph *= P[ci[d + jj] * n + cj[jj]] * std::conj(P[ci[jj] * n + cj[d + jj]]);
      acc += g.samples[flat] * h.samples[j] * ph;
    }
    out.samples[i] = cell * acc;
  });
  return out;
}

TwistedField laguerre_field(int k, double lam, int d, const Axis& axis) {
  const double la = std::abs(lam);
  return TwistedField::from_function(
      d, lam, axis, [k, la](const Eigen::VectorXd& x) { return cplx(laguerre_fn(k, la, x), 0.0); });
}

TwistedField project_k(const TwistedField& g, int k) {
  if (k < 0) throw std::invalid_argument("project_k: k >= 0 required");
  // Lambda_k g(x) = (2 pi)^{-d} |lam|^d int g(v) phi_k(x - v) e^{-i lam Im(x . conj(v)) / 2} dv:
  // the Laguerre factor is evaluated analytically on the difference lattice, so
  // wide phi_k (small |lam|, large k) are not truncated at the box.
  const int n = g.axis.n, d = g.d, twod = 2 * d;
  const std::size_t npts = g.samples.size();
  const double la = std::abs(g.lam);

  std::vector<int> coords(npts * twod);
  for (std::size_t i = 0; i < npts; ++i) decode(i, n, twod, &coords[i * twod]);
  // phi_k(|lam|, .) over the (2n-1)^{2d} difference lattice
  const int nd = 2 * n - 1;
  std::size_t ndiff = 1;
  for (int a = 0; a < twod; ++a) ndiff *= nd;
  std::vector<double> lag(ndiff);
  const double h = g.axis.h();
  parallel_for(ndiff, [&](std::size_t f) {
    Eigen::VectorXd dx(twod);
    std::size_t r = f;
    for (int a = twod - 1; a >= 0; --a) {
      dx(a) = (int(r % nd) - (n - 1)) * h;
      r /= nd;
    }
    lag[f] = laguerre_fn(k, la, dx);
  });
  std::vector<cplx> P(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      P[a * n + b] = std::polar(1.0, 0.5 * g.lam * g.axis.point(a) * g.axis.point(b));

  TwistedField out = g;
  const double pref = g.cell_volume() * std::pow(la / (2.0 * M_PI), d);
  parallel_for(npts, [&](std::size_t i) {
    const int* ci = &coords[i * twod];
    cplx acc(0.0, 0.0);
    for (std::size_t j = 0; j < npts; ++j) {
      const int* cj = &coords[j * twod];
      std::size_t flat = 0;
      for (int a = 0; a < twod; ++a) flat = flat * nd + (ci[a] - cj[a] + n - 1);
      cplx ph(1.0, 0.0);  // e^{-i lam Im(x_i . conj(v_j)) / 2}
      for (int jj = 0; jj < d; ++jj)
        ph *= std::conj(P[ci[d + jj] * n + cj[jj]]) * P[ci[jj] * n + cj[d + jj]];
      acc += g.samples[j] * lag[flat] * ph;
    }
    out.samples[i] = pref * acc;
  });
  return out;
}

TwistedLaplacianResult twisted_laplacian_spectral(const TwistedField& g, int N_max) {
  const int d = g.d, twod = 2 * d, n = g.axis.n;
  const double la = std::abs(g.lam);
  const auto idx = multi_indices_up_to(d, N_max);
  const std::size_t nm = idx.size(), npts = g.samples.size();
  HeisETable tab(la, g.axis, N_max, N_max);
  const double pref = std::pow(2.0 * M_PI, -0.5 * d) * std::pow(la, 0.5 * d);
  const bool neg = g.lam < 0;  // basis for lam < 0 is the conjugate family

  std::vector<int> coords(npts * twod);
  for (std::size_t i = 0; i < npts; ++i) decode(i, n, twod, &coords[i * twod]);
  auto phi_at = [&](std::size_t a, std::size_t b, std::size_t pt) {
    const int* c = &coords[pt * twod];
    cplx v = pref * tab.value(idx[a], idx[b], c, c + d);
    return neg ? std::conj(v) : v;
  };

  const double cell = g.cell_volume();
  std::vector<cplx> coef(nm * nm);
  parallel_for(nm * nm, [&](std::size_t ab) {
    const std::size_t a = ab / nm, b = ab % nm;
    cplx s(0.0, 0.0);
    for (std::size_t pt = 0; pt < npts; ++pt) s += g.samples[pt] * std::conj(phi_at(a, b, pt));
    coef[ab] = cell * s;
  });

  TwistedLaplacianResult res;
  res.field = g;
  res.projected = g;
  parallel_for(npts, [&](std::size_t pt) {
    cplx s(0.0, 0.0), p(0.0, 0.0);
    for (std::size_t a = 0; a < nm; ++a) {
      const double ev = -la * (2.0 * multi_order(idx[a]) + d);
      for (std::size_t b = 0; b < nm; ++b) {
        const cplx term = coef[a * nm + b] * phi_at(a, b, pt);
        s += ev * term;
        p += term;
      }
    }
    res.field.samples[pt] = s;
    res.projected.samples[pt] = p;
  });

  double mass = 0;
  for (const cplx& c : coef) mass += std::norm(c);
  const double gn = g.l2_norm();
  res.tail_fraction = gn > 0 ? std::sqrt(std::max(0.0, gn * gn - mass)) / gn : 0.0;
  return res;
}

TwistedField twisted_laplacian_fd(const TwistedField& g, int stride) {
  if (stride < 1) throw std::invalid_argument("twisted_laplacian_fd: stride >= 1 required");
  const int d = g.d, twod = 2 * d, n = g.axis.n;
  const double h = g.axis.h() * stride, lam = g.lam;
  const std::size_t npts = g.samples.size();
  std::vector<std::size_t> strd(twod);
  strd[twod - 1] = 1;
  for (int a = twod - 2; a >= 0; --a) strd[a] = strd[a + 1] * n;

  TwistedField out = g;
  parallel_for(npts, [&](std::size_t i) {
    std::vector<int> idx(twod);
    decode(i, n, twod, idx.data());
    auto at = [&](int a, int off) -> cplx {
      const int t = idx[a] + off * stride;
      if (t < 0 || t >= n) return cplx(0.0, 0.0);  // decayed outside the box
      return g.samples[i + static_cast<std::ptrdiff_t>(off * stride) *
                               static_cast<std::ptrdiff_t>(strd[a])];
    };
    cplx lap(0.0, 0.0), ang(0.0, 0.0);
    double r2 = 0;
    for (int a = 0; a < twod; ++a) {
      lap += (-at(a, -2) + 16.0 * at(a, -1) - 30.0 * g.samples[i] + 16.0 * at(a, 1) - at(a, 2)) /
             (12.0 * h * h);
      const double xa = g.axis.point(idx[a]);
      r2 += xa * xa;
    }
    for (int j = 0; j < d; ++j) {
      const cplx dx =
          (at(j, -2) - 8.0 * at(j, -1) + 8.0 * at(j, 1) - at(j, 2)) / (12.0 * h);
      const cplx dy =
          (at(d + j, -2) - 8.0 * at(d + j, -1) + 8.0 * at(d + j, 1) - at(d + j, 2)) / (12.0 * h);
      ang += g.axis.point(idx[d + j]) * dx - g.axis.point(idx[j]) * dy;
    }
    out.samples[i] = lap - 0.25 * lam * lam * r2 * g.samples[i] - cplx(0.0, lam) * ang;
  });
  return out;
}

double rho_exponent(double r, int d) {
  if (!(r >= 2)) throw std::invalid_argument("rho_exponent: r >= 2 required");
  const double ir = std::isinf(r) ? 0.0 : 1.0 / r;
  const double breakpoint = 2.0 * (2 * d + 1) / (2 * d - 1.0);
  if (!std::isinf(r) && r <= breakpoint) return ir - 0.5;
  return 2.0 * d * (0.5 - ir) - 1.0;
}

namespace {

// Radial profiles R_b(rho) = Phi_{k b}^lam(rho, 0) for b <= B (real at y = 0);
// the full function is Phi_{k b}(rho e^{i theta}) = e^{i (k - b) theta} R_b(rho).
Eigen::MatrixXd radial_profiles(int k, int B, double lam, const QuadratureRule1D& rad) {
  const int nr = static_cast<int>(rad.nodes.size());
  const double pref = std::sqrt(lam / (2.0 * M_PI)), s = std::sqrt(lam);
  Eigen::MatrixXd R(nr, B + 1);
  parallel_for(static_cast<std::size_t>(nr), [&](std::size_t i) {
    Eigen::MatrixXcd I = axis_factors(k, B, s, rad.nodes[i], 0.0);
    for (int b = 0; b <= B; ++b) R(static_cast<int>(i), b) = pref * I(k, b).real();
  });
  return R;
}

double radial_box(int k, int B, double lam) {
  return std::sqrt(2.0 * (4.0 * (k + B) + 2.0) / lam) + 8.0 / std::sqrt(lam);
}

// ||Lambda_k||_{2->r}, r finite, as the maximum of ||g||_r over the unit-L^2
// range span{Phi_{k b}}: nonlinear power iteration on the coefficient vector,
// polar grid with an FFT over the angular factor e^{i (k - b) theta}.
NormEstimate range_power_iteration(int k, double r, int budget, double lam) {
  const int B = k + 40, ntheta = 256;
  const auto rad = gauss_legendre(320, 0.0, radial_box(k, B, lam));
  const int nr = static_cast<int>(rad.nodes.size());
  const Eigen::MatrixXd R = radial_profiles(k, B, lam, rad);
  const double dtheta = 2.0 * M_PI / ntheta;
  auto freq = [&](int b) { return ((k - b) % ntheta + ntheta) % ntheta; };

  Eigen::VectorXcd c(B + 1);
  for (int b = 0; b <= B; ++b) c(b) = 1.0 / (1.0 + b);
  c /= c.norm();

  std::vector<std::vector<cplx>> grid(nr, std::vector<cplx>(ntheta));
  NormEstimate est;
  est.method = "range-power-iteration";
  double prev = -1.0;
  for (int it = 0; it < budget; ++it) {
    est.iterations = it + 1;
    parallel_for(static_cast<std::size_t>(nr), [&](std::size_t i) {
      std::vector<cplx> spec(ntheta, cplx(0.0, 0.0));
      for (int b = 0; b <= B; ++b) spec[freq(b)] += c(b) * R(static_cast<int>(i), b);
      fft_pow2(spec, +1);
      grid[i] = std::move(spec);
    });
    double n2 = 0;
    for (int i = 0; i < nr; ++i) {
      double row = 0;
      for (const cplx& v : grid[i]) row += std::norm(v);
      n2 += rad.weights[i] * rad.nodes[i] * dtheta * row;
    }
    const double scale = 1.0 / std::sqrt(n2);
    c *= scale;
    double pr = 0;
    for (int i = 0; i < nr; ++i) {
      double row = 0;
      for (cplx& v : grid[i]) {
        v *= scale;
        row += std::pow(std::abs(v), r);
      }
      pr += rad.weights[i] * rad.nodes[i] * dtheta * row;
    }
    est.value = std::pow(pr, 1.0 / r);
    if (prev >= 0 && std::abs(est.value - prev) <= 1e-10 * est.value) {
      est.converged = true;
      return est;
    }
    prev = est.value;
    // dual step: project |g|^{r-2} g back onto the coefficient basis
    Eigen::VectorXcd cn = Eigen::VectorXcd::Zero(B + 1);
    for (int i = 0; i < nr; ++i) {
      std::vector<cplx> spec(ntheta);
      for (int t = 0; t < ntheta; ++t) {
        const cplx v = grid[i][t];
        const double a = std::abs(v);
        spec[t] = a > 0 ? std::pow(a, r - 2) * v : cplx(0.0, 0.0);
      }
      fft_pow2(spec, -1);
      const double w = rad.weights[i] * rad.nodes[i] * dtheta;
      for (int b = 0; b <= B; ++b) cn(b) += w * R(i, b) * spec[freq(b)];
    }
    c = cn / cn.norm();
  }
  est.converged = false;
  return est;
}

NormEstimate witness_lower_bound(int k, double p, double r, double lam) {
  const auto rad = gauss_legendre(400, 0.0, radial_box(k, k, lam));
  const int nr = static_cast<int>(rad.nodes.size());
  const Eigen::MatrixXd R = radial_profiles(k, k, lam, rad);
  auto qnorm = [&](const Eigen::VectorXd& f, double q) {
    if (std::isinf(q)) return f.cwiseAbs().maxCoeff();
    double s = 0;
    for (int i = 0; i < nr; ++i)
      s += rad.weights[i] * rad.nodes[i] * std::pow(std::abs(f(i)), q);
    return std::pow(2.0 * M_PI * s, 1.0 / q);
  };
  Eigen::VectorXd phik(nr), row0 = R.col(0);
  for (int i = 0; i < nr; ++i) {
    const double t = 0.5 * lam * rad.nodes[i] * rad.nodes[i];
    phik(i) = laguerre_poly(k, 0.0, t) * std::exp(-0.5 * t);
  }
  NormEstimate est;
  est.lower_bound_only = true;
  est.method = "witness(phi_k, Phi_k0)";
  est.value = std::max(qnorm(phik, r) / qnorm(phik, p), qnorm(row0, r) / qnorm(row0, p));
  est.iterations = 1;
  return est;
}

}  // namespace

NormEstimate projector_norm_estimate(int k, double p, double r, int budget, double lam_abs) {
  if (k < 0 || !(p >= 1 && p <= 2) || !(r >= 2) || !(lam_abs > 0))
    throw std::invalid_argument("projector_norm_estimate: need k >= 0, 1 <= p <= 2 <= r, lam > 0");
  if (p == 2 && std::isinf(r)) {
    // kernel row K(x, .) has constant L^2 norm (2 pi)^{-d} lam^d ||phi_k||_2
    const auto gl = gauss_legendre(400, 0.0, 4.0 * k + 80.0);
    double J = 0;  // int L_k(t)^2 e^{-t} dt  (= ||phi_k||_2^2 * lam / (2 pi))
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double L = laguerre_poly(k, 0.0, gl.nodes[q]);
      J += gl.weights[q] * L * L * std::exp(-gl.nodes[q]);
    }
    NormEstimate est;
    est.method = "kernel-row";
    est.value = std::sqrt(lam_abs * J / (2.0 * M_PI));
    est.iterations = 1;
    return est;
  }
  if (p == 2) return range_power_iteration(k, r, budget, lam_abs);
  return witness_lower_bound(k, p, r, lam_abs);
}

SeriesResult series_partial_sum(double p, double r, int d, int m, long K, bool measured_norms) {
  SeriesResult res;
  if (!(p >= 1 && p <= 2)) {
    res.admissible = false;
    res.diagnostic = "need 1 <= p <= 2";
    return res;
  }
  if (!(r >= 1 && r <= 2.0 * (m + 1) / (m + 3))) {
    res.admissible = false;
    res.diagnostic = "need 1 <= r <= 2(m+1)/(m+3)";
    return res;
  }
  if (m == 1 && p == 2) {
    res.admissible = false;
    res.diagnostic = "the (m, p) = (1, 2) exclusion applies";
    return res;
  }
  if (measured_norms && p != 2) {
    res.admissible = false;
    res.diagnostic = "measured norms are available only on the p = 2 path";
    return res;
  }
  const double e = m * (2.0 / r - 1.0) + d * (2.0 / p - 1.0);
  const double pdual = (p == 1) ? kInf : p / (p - 1.0);
  // bound path: ||Lambda_k||_{p -> p'} <= C (2k+d)^{rho(p')}; measured path
  // (p = 2): ||Lambda_k||_{2 -> 2} = 1 exactly
  const double sigma = (measured_norms ? 0.0 : rho_exponent(pdual, d)) - e;
  double S = 0;
  long next = 1;
  for (long k = 0; k <= K; ++k) {
    S += std::pow(2.0 * k + d, sigma);
    if (k == next) {
      res.checkpoints.push_back(S);
      next *= 2;
    }
  }
  res.S_K = S;
  if (sigma < -1.0)
    res.tail_bound = std::pow(2.0 * K + d, sigma + 1.0) / (-2.0 * (sigma + 1.0));
  else {
    res.tail_bound = kInf;
    res.diagnostic = "summand exponent not below -1; tail majorant diverges";
  }
  return res;
}

}  // namespace htg
