#include "gft.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>

#include "quadrature.hpp"
#include "util/parallel.hpp"

namespace htg {

namespace {

void decode_idx(std::size_t flat, int n, int dims, int* idx) {
  for (int a = dims - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n);
    flat /= n;
  }
}

std::size_t ipow(int n, int e) {
  std::size_t s = 1;
  while (e-- > 0) s *= n;
  return s;
}

}  // namespace

std::size_t SpaceGrid::n_x() const { return ipow(xaxis.n, 2 * d); }
std::size_t SpaceGrid::n_z() const { return ipow(zaxis.n, m); }

Eigen::VectorXd SpaceGrid::xpoint(std::size_t xf) const {
  std::vector<int> idx(2 * d);
  decode_idx(xf, xaxis.n, 2 * d, idx.data());
  Eigen::VectorXd x(2 * d);
  for (int a = 0; a < 2 * d; ++a) x(a) = xaxis.point(idx[a]);
  return x;
}

Eigen::VectorXd SpaceGrid::zpoint(std::size_t zf) const {
  std::vector<int> idx(m);
  decode_idx(zf, zaxis.n, m, idx.data());
  Eigen::VectorXd z(m);
  for (int a = 0; a < m; ++a) z(a) = zaxis.point(idx[a]);
  return z;
}

bool SpaceGrid::operator==(const SpaceGrid& o) const {
  return d == o.d && m == o.m && xaxis.n == o.xaxis.n && xaxis.L == o.xaxis.L &&
         zaxis.n == o.zaxis.n && zaxis.L == o.zaxis.L;
}

SpaceField SpaceField::from_function(
    const SpaceGrid& g,
    const std::function<cplx(const Eigen::VectorXd&, const Eigen::VectorXd&)>& f) {
  SpaceField out;
  out.grid = g;
  const std::size_t nx = g.n_x(), nz = g.n_z();
  out.samples.resize(nx * nz);
  parallel_for(nx, [&](std::size_t xf) {
    const Eigen::VectorXd x = g.xpoint(xf);
    for (std::size_t zf = 0; zf < nz; ++zf) out.samples[xf * nz + zf] = f(x, g.zpoint(zf));
  });
  return out;
}

double SpaceField::l2_norm() const {
  double s = 0;
  for (const cplx& v : samples) s += std::norm(v);
  return std::sqrt(grid.cell() * s);
}

double SpaceField::boundary_ratio() const {
  const std::size_t nx = grid.n_x(), nz = grid.n_z();
  const int twod = 2 * grid.d;
  std::vector<int> xi(twod), zi(grid.m);
  double all = 0, bnd = 0;
  for (std::size_t xf = 0; xf < nx; ++xf) {
    decode_idx(xf, grid.xaxis.n, twod, xi.data());
    bool xedge = false;
    for (int a = 0; a < twod; ++a) xedge |= (xi[a] == 0 || xi[a] == grid.xaxis.n - 1);
    for (std::size_t zf = 0; zf < nz; ++zf) {
      const double v = std::abs(samples[xf * nz + zf]);
      all = std::max(all, v);
      bool edge = xedge;
      if (!edge) {
        decode_idx(zf, grid.zaxis.n, grid.m, zi.data());
        for (int a = 0; a < grid.m; ++a) edge |= (zi[a] == 0 || zi[a] == grid.zaxis.n - 1);
      }
      if (edge) bnd = std::max(bnd, v);
    }
  }
  return all > 0 ? bnd / all : 0.0;
}

std::vector<std::pair<Eigen::VectorXd, double>> sphere_rule(int m) {
  std::vector<std::pair<Eigen::VectorXd, double>> sphere;
  if (m == 1) {
    // S^0 = {+1, -1} with counting measure
    sphere.push_back({Eigen::VectorXd::Constant(1, 1.0), 1.0});
    sphere.push_back({Eigen::VectorXd::Constant(1, -1.0), 1.0});
  } else if (m == 3) {
    // 26-point Lebedev rule (octahedron vertices + edge midpoints + cube
    // corners), weights 1/21, 4/105, 9/280 on the unit sphere, times 4 pi
    for (int a = 0; a < 3; ++a)
      for (int sgn : {1, -1}) {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
        p(a) = sgn;
        sphere.push_back({p, 4.0 * M_PI / 21});
      }
    for (int a = 0; a < 3; ++a)
      for (int s1 : {1, -1})
        for (int s2 : {1, -1}) {
          Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
          const int b = (a + 1) % 3, c = (a + 2) % 3;
          p(b) = s1 * M_SQRT1_2;
          p(c) = s2 * M_SQRT1_2;
          sphere.push_back({p, 4.0 * M_PI * 4.0 / 105});
        }
    for (int s1 : {1, -1})
      for (int s2 : {1, -1})
        for (int s3 : {1, -1}) {
          Eigen::VectorXd p(3);
          p << s1, s2, s3;
          sphere.push_back({p / std::sqrt(3.0), 4.0 * M_PI * 9.0 / 280});
        }
  } else {
    throw std::invalid_argument("sphere_rule: m must be 1 or 3");
  }
  return sphere;
}

SpectralGrid make_spectral_grid(int d, int m, int N_max, double lam_min, double lam_max,
                                int n_rad) {
  if (!(lam_min > 0 && lam_max > lam_min))
    throw std::invalid_argument("make_spectral_grid: need 0 < lam_min < lam_max");
  SpectralGrid sg;
  sg.d = d;
  sg.m = m;
  sg.N_max = N_max;
  sg.lam_min = lam_min;
  sg.lam_max = lam_max;
  sg.idx = multi_indices_up_to(d, N_max);
  const auto rad = gauss_legendre(n_rad, lam_min, lam_max);
  const auto sphere = sphere_rule(m);
  const double jac_pow = m - 1;  // rho^{m-1} polar Jacobian
  for (int i = 0; i < n_rad; ++i) {
    const double rho = rad.nodes[i];
    for (const auto& [omega, w] : sphere)
      sg.nodes.push_back({rho * omega, rad.weights[i] * std::pow(rho, jac_pow) * w});
  }
  return sg;
}

TwistedField central_ft(const SpaceField& f, const DualFrequency& lam) {
  const SpaceGrid& g = f.grid;
  if (lam.lambda.size() != g.m) throw std::invalid_argument("central_ft: lambda dimension");
  const double nyq = M_PI / g.zaxis.h();
  for (int j = 0; j < g.m; ++j)
    if (std::abs(lam.lambda(j)) > nyq)
      throw std::invalid_argument("central_ft: lambda outside the z Nyquist band");
  TwistedField out;
  out.d = g.d;
  out.lam = (g.m == 1) ? lam.lambda(0) : lam.rho();
  out.axis = g.xaxis;
  const std::size_t nx = g.n_x(), nz = g.n_z();
  out.samples.assign(nx, cplx(0, 0));
  std::vector<cplx> ph(nz);
  for (std::size_t zf = 0; zf < nz; ++zf)
    ph[zf] = std::polar(g.zcell(), -lam.lambda.dot(g.zpoint(zf)));
  parallel_for(nx, [&](std::size_t xf) {
    cplx acc(0, 0);
    for (std::size_t zf = 0; zf < nz; ++zf) acc += f.samples[xf * nz + zf] * ph[zf];
    out.samples[xf] = acc;
  });
  return out;
}

namespace {

int roundup32(int n) { return ((n + 31) / 32) * 32; }

// Trigonometric interpolation from n to rf n points on a uniform periodic
// axis (even-n Dirichlet kernel); cached by (n, rf).  The basis coefficients
// oscillate faster than any sensible field grid at the high end of the lambda
// band, so quadrature must happen on a refined grid of the field's trig
// interpolant: coarse Riemann sums alias those oscillations back into the
// field's band and produce O(1) spurious coefficients.
const Eigen::MatrixXd& upsample_matrix(int n, int rf) {
  static std::map<std::pair<int, int>, Eigen::MatrixXd> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(n, rf);
  const auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const int nf = n * rf;
  Eigen::MatrixXd U(nf, n);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < n; ++j) {
      if (i % rf == 0) {
        U(i, j) = (i / rf == j) ? 1.0 : 0.0;
        continue;
      }
      const double th = std::remainder(2.0 * M_PI * (double(i) / nf - double(j) / n), 2.0 * M_PI);
      U(i, j) = std::sin(0.5 * n * th) / (n * std::tan(0.5 * th));
    }
  return cache.emplace(key, std::move(U)).first->second;
}

// Per-axis refinement factor so the refined Nyquist covers the Hermite-band
// oscillation of G_ab (local frequency (s/2) sqrt(2N+1) in x) on top of the
// field's own band.
int refine_factor(double s, int N, double h) {
  return std::max(1, static_cast<int>(std::ceil(1.0 + 0.5 * s * std::sqrt(2.0 * N + 1.0) * h / M_PI)));
}

// Gauss-Hermite count for the v-integral of e^{-v^2} htil_a(v+c) htil_b(v-c)
// fhat(x, s v): the field factor oscillates in v at up to s L_y.
int sweep_gh_count(int N, double s, double Ly) {
  const int n = 2 * N + 48 + static_cast<int>(std::ceil(0.5 * std::pow(s * Ly, 2)));
  return std::min(512, roundup32(n));
}

// One pass over the lambda nodes evaluating the matrix-coefficient basis once
// per (node, x): forward-transforms every field in `fin` and inverts every
// coefficient set in `cin`.
void gft_sweep(const HTypeStructure& s, const SpectralGrid& sg, const SpaceGrid& grid,
               const std::vector<const SpaceField*>& fin, std::vector<SpectralCoeffs>* fout,
               const std::vector<const SpectralCoeffs*>& cin, std::vector<SpaceField>* iout) {
  if (grid.d != s.d || grid.m != s.m || sg.d != s.d || sg.m != s.m)
    throw std::invalid_argument("gft: structure/grid dimension mismatch");
  const std::size_t nx = grid.n_x(), nz = grid.n_z(), ni = sg.nidx(), nn = sg.nodes.size();
  const int d = s.d, N = sg.N_max;
  const double nyq = M_PI / grid.zaxis.h();
  for (const auto& node : sg.nodes)
    for (int j = 0; j < s.m; ++j)
      if (std::abs(node.lam(j)) > nyq)
        throw std::invalid_argument("gft: lambda grid outside the z Nyquist band");

  std::vector<int> ord(ni);
  for (std::size_t a = 0; a < ni; ++a) ord[a] = multi_order(sg.idx[a]);

  fout->clear();
  for (const SpaceField* f : fin) {
    if (!(f->grid == grid)) throw std::invalid_argument("gft: field grid mismatch");
    SpectralCoeffs c;
    c.sg = sg;
    c.grid = grid;
    c.blocks.assign(nn, Eigen::MatrixXcd::Zero(ni, ni));
    fout->push_back(std::move(c));
  }
  iout->clear();
  for (const SpectralCoeffs* c : cin) {
    (void)c;
    SpaceField f;
    f.grid = grid;
    f.samples.assign(nx * nz, cplx(0, 0));
    iout->push_back(std::move(f));
  }
  // per-node point values of the partial inverse (z-phase applied afterwards)
  std::vector<std::vector<std::vector<cplx>>> gl(
      cin.size(), std::vector<std::vector<cplx>>(nn, std::vector<cplx>(nx)));

  const int nax = grid.xaxis.n;
  const double hax = grid.xaxis.h(), Lax = grid.xaxis.L;
  if (nax % 2 != 0) throw std::invalid_argument("gft: even horizontal axis size required");

  // y-axis DFT matrix (d = 1 path), bins kb = k mod n for k in [-n/2, n/2)
  Eigen::MatrixXcd dfty;
  if (d == 1) {
    dfty.resize(nax, nax);
    for (int j = 0; j < nax; ++j)
      for (int kb = 0; kb < nax; ++kb)
        dfty(j, kb) = std::polar(1.0 / nax, -2.0 * M_PI * j * kb / nax);
  }

  parallel_for(nn, [&](std::size_t w) {
    const DualFrequency df(sg.nodes[w].lam);
    const double la = df.rho(), sq = std::sqrt(la);
    const Eigen::MatrixXd T = diagonalize_j(df, s);
    // f^{-lambda} for each forward field
    std::vector<cplx> zph(nz);
    for (std::size_t zf = 0; zf < nz; ++zf)
      zph[zf] = std::polar(grid.zcell(), df.lambda.dot(grid.zpoint(zf)));
    std::vector<std::vector<cplx>> fl(fin.size(), std::vector<cplx>(nx, cplx(0, 0)));
    for (std::size_t fi = 0; fi < fin.size(); ++fi)
      for (std::size_t xf = 0; xf < nx; ++xf) {
        cplx acc(0, 0);
        for (std::size_t zf = 0; zf < nz; ++zf) acc += fin[fi]->samples[xf * nz + zf] * zph[zf];
        fl[fi][xf] = acc;
      }

    const int rf = refine_factor(sq, N, hax);
    const int nq = sweep_gh_count(N, sq, Lax);
    const auto& gh = gauss_hermite(nq);
    const Eigen::MatrixXd& Ux = upsample_matrix(nax, rf);
    const int nfp = nax * rf;
    const double hf = hax / rf;

    if (d == 1) {
      // Separable path.  The twist phase cancels against the Gauss-Hermite
      // shift phase,
      //   G_ab(x, y) = sum_q w_q e^{-c^2} htil_a(v_q+c) htil_b(v_q-c)
      //                e^{i s v_q yh},          c = s x / 2,  yh = T(1,1) y,
      // so the y integral against the field is its Fourier transform at the
      // off-grid frequencies s v_q (exact on the trig interpolant) and only
      // the x axis needs refinement.  The inverse is the conjugate sum at the
      // coarse points, exact given the coefficients.
      const double tsg = T(1, 1);  // T = diag(1, +-1) when d = 1

      // exact integral of the interpolant mode (-1)^k fhat_k against
      // e^{i om y}: 2L sin(om L) / (pi k + om L)
      Eigen::MatrixXcd Cm(nax, nq);
      for (int kb = 0; kb < nax; ++kb) {
        const int k = (kb < nax / 2) ? kb : kb - nax;
        for (int q = 0; q < nq; ++q) {
          const double omL = sq * gh.nodes[q] * tsg * Lax;
          const double den = M_PI * k + omL;
          const double coef = (std::abs(den) > 1e-8) ? 2.0 * Lax * std::sin(omL) / den
                                                     : 2.0 * Lax * (k % 2 == 0 ? 1.0 : -1.0);
          Cm(kb, q) = coef;
        }
      }

      // Hermite tables over (fine x, q); column m = i nq + q
      const std::size_t M = static_cast<std::size_t>(nfp) * nq;
      Eigen::MatrixXd Ah(N + 1, M), Bh(N + 1, M);
      Eigen::VectorXd wt(M);
      std::vector<double> ha(N + 1), hb(N + 1);
      for (int i = 0; i < nfp; ++i) {
        const double c = 0.5 * sq * (-Lax + i * hf);
        const double damp = std::exp(-c * c);
        for (int q = 0; q < nq; ++q) {
          hermite_seq(N, gh.nodes[q] + c, ha.data(), /*scaled=*/true);
          hermite_seq(N, gh.nodes[q] - c, hb.data(), /*scaled=*/true);
          const std::size_t m = static_cast<std::size_t>(i) * nq + q;
          wt(m) = gh.weights[q] * damp;
          for (int a = 0; a <= N; ++a) {
            Ah(a, m) = ha[a];
            Bh(a, m) = hb[a];
          }
        }
      }

      for (std::size_t fi = 0; fi < fin.size(); ++fi) {
        const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic,
                                             Eigen::RowMajor>>
            F0(fl[fi].data(), nax, nax);
        const Eigen::MatrixXcd Yf = Ux * (F0 * dfty * Cm);  // nfp x nq
        Eigen::VectorXcd V(M);
        for (int i = 0; i < nfp; ++i)
          for (int q = 0; q < nq; ++q) {
            const std::size_t m = static_cast<std::size_t>(i) * nq + q;
            V(m) = hf * wt(m) * Yf(i, q);
          }
        const Eigen::MatrixXd Fre =
            (Ah.array().rowwise() * V.real().transpose().array()).matrix() * Bh.transpose();
        const Eigen::MatrixXd Fim =
            (Ah.array().rowwise() * V.imag().transpose().array()).matrix() * Bh.transpose();
        for (std::size_t a = 0; a < ni; ++a)
          for (std::size_t b = 0; b < ni; ++b)
            (*fout)[fi].blocks[w](a, b) = cplx(Fre(ord[a], ord[b]), Fim(ord[a], ord[b]));
      }

      if (!cin.empty()) {
        Eigen::MatrixXcd Pm(nq, nax);  // e^{-i s v_q yh} at the coarse points
        for (int q = 0; q < nq; ++q)
          for (int iy = 0; iy < nax; ++iy)
            Pm(q, iy) = std::polar(1.0, -sq * gh.nodes[q] * tsg * (-Lax + iy * hax));
        for (std::size_t ci = 0; ci < cin.size(); ++ci) {
          Eigen::MatrixXd Dre = Eigen::MatrixXd::Zero(N + 1, N + 1), Dim = Dre;
          for (std::size_t a = 0; a < ni; ++a)
            for (std::size_t b = 0; b < ni; ++b) {
              const cplx v = cin[ci]->blocks[w](a, b);
              Dre(ord[a], ord[b]) += v.real();
              Dim(ord[a], ord[b]) += v.imag();
            }
          Eigen::MatrixXcd Kw(nax, nq);
          for (int i = 0; i < nax; ++i) {
            const auto Ai = Ah.middleCols(static_cast<std::size_t>(i) * rf * nq, nq);
            const auto Bi = Bh.middleCols(static_cast<std::size_t>(i) * rf * nq, nq);
            const Eigen::RowVectorXd Kre =
                ((Dre.transpose() * Ai).cwiseProduct(Bi)).colwise().sum();
            const Eigen::RowVectorXd Kim =
                ((Dim.transpose() * Ai).cwiseProduct(Bi)).colwise().sum();
            for (int q = 0; q < nq; ++q)
              Kw(i, q) = wt(static_cast<std::size_t>(i) * rf * nq + q) * cplx(Kre(q), Kim(q));
          }
          const Eigen::MatrixXcd glm = Kw * Pm;  // coarse (x, y)
          for (int i = 0; i < nax; ++i)
            for (int iy = 0; iy < nax; ++iy)
              gl[ci][w][static_cast<std::size_t>(i) * nax + iy] = glm(i, iy);
        }
      }
      return;
    }

    // Generic path: refine every horizontal axis of f^{-lambda} by trig
    // interpolation, then integrate per fine point with per-pair factors; the
    // inverse is synthesized at the coarse points (fine indices divisible by
    // rf).  Inversion alone is pointwise-exact and needs no refinement.
    const int rfl = fin.empty() ? 1 : rf;
    const int nfl = fin.empty() ? nax : nfp;
    const double hfe = hax / rfl;
    const std::size_t nxf = ipow(nfl, 2 * d);
    std::vector<std::vector<cplx>> flf(fin.size());
    for (std::size_t fi = 0; fi < fin.size(); ++fi) {
      std::vector<cplx> cur = fl[fi];
      for (int ax = 0; ax < 2 * d; ++ax) {
        const std::size_t pre = ipow(nfl, ax), post = ipow(nax, 2 * d - 1 - ax);
        std::vector<cplx> nxt(pre * nfl * post, cplx(0, 0));
        for (std::size_t p = 0; p < pre; ++p)
          for (int i = 0; i < nfl; ++i) {
            cplx* out = &nxt[(p * nfl + i) * post];
            for (int j = 0; j < nax; ++j) {
              const double u = Ux(i, j);
              if (u == 0.0) continue;
              const cplx* in = &cur[(p * nax + j) * post];
              for (std::size_t t = 0; t < post; ++t) out[t] += u * in[t];
            }
          }
        cur.swap(nxt);
      }
      flf[fi] = std::move(cur);
    }

    const double fcell = std::pow(hfe, 2 * d);
    std::vector<int> xi(2 * d);
    std::vector<Eigen::MatrixXcd> G(d);
    Eigen::VectorXd xp(2 * d);
    for (std::size_t xf = 0; xf < nxf; ++xf) {
      decode_idx(xf, nfl, 2 * d, xi.data());
      bool coarse = !cin.empty();
      for (int a = 0; a < 2 * d; ++a) {
        xp(a) = -Lax + xi[a] * hfe;
        coarse = coarse && (xi[a] % rfl == 0);
      }
      const Eigen::VectorXd xh = T.transpose() * xp;
      for (int j = 0; j < d; ++j)
        G[j] = std::polar(1.0, 0.5 * la * xh(j) * xh(d + j)) *
               axis_factors(N, N, sq, xh(j), xh(d + j));
      std::size_t xc = 0;
      if (coarse)
        for (int a = 0; a < 2 * d; ++a) xc = xc * nax + xi[a] / rfl;
      for (std::size_t a = 0; a < ni; ++a)
        for (std::size_t b = 0; b < ni; ++b) {
          cplx prod = G[0](sg.idx[a][0], sg.idx[b][0]);
          for (int j = 1; j < d; ++j) prod *= G[j](sg.idx[a][j], sg.idx[b][j]);
          for (std::size_t fi = 0; fi < fin.size(); ++fi)
            (*fout)[fi].blocks[w](a, b) += flf[fi][xf] * prod;
          if (coarse)
            for (std::size_t ci = 0; ci < cin.size(); ++ci)
              gl[ci][w][xc] += cin[ci]->blocks[w](a, b) * std::conj(prod);
        }
    }
    for (std::size_t fi = 0; fi < fin.size(); ++fi) (*fout)[fi].blocks[w] *= fcell;
  });

  // forward: measured N_max truncation proxy
  for (auto& c : *fout) {
    double total = 0, shell = 0;
    for (std::size_t w = 0; w < nn; ++w) {
      const double mw = c.sg.nodes[w].weight * std::pow(c.sg.nodes[w].lam.norm(), d);
      for (std::size_t a = 0; a < ni; ++a)
        for (std::size_t b = 0; b < ni; ++b) {
          const double v = mw * std::norm(c.blocks[w](a, b));
          total += v;
          if (ord[a] == N || ord[b] == N) shell += v;
        }
    }
    c.top_shell_fraction = total > 0 ? shell / total : 0.0;
    c.truncation_warning = c.top_shell_fraction > 1e-4;
  }

  // inverse: vertical synthesis, fixed node order
  const double pref = std::pow(2.0 * M_PI, -(d + s.m));
  for (std::size_t ci = 0; ci < cin.size(); ++ci) {
    for (std::size_t w = 0; w < nn; ++w) {
      const double c0 = pref * sg.nodes[w].weight * std::pow(sg.nodes[w].lam.norm(), d);
      std::vector<cplx> zph(nz);
      for (std::size_t zf = 0; zf < nz; ++zf)
        zph[zf] = std::polar(c0, -sg.nodes[w].lam.dot(grid.zpoint(zf)));
      auto& out = (*iout)[ci].samples;
      for (std::size_t xf = 0; xf < nx; ++xf) {
        const cplx v = gl[ci][w][xf];
        for (std::size_t zf = 0; zf < nz; ++zf) out[xf * nz + zf] += v * zph[zf];
      }
    }
  }
}

}  // namespace

std::vector<SpectralCoeffs> forward_batch(const std::vector<const SpaceField*>& fs,
                                          const HTypeStructure& s, const SpectralGrid& sg) {
  if (fs.empty()) return {};
  std::vector<SpectralCoeffs> out;
  std::vector<SpaceField> none;
  gft_sweep(s, sg, fs[0]->grid, fs, &out, {}, &none);
  return out;
}

SpectralCoeffs forward(const SpaceField& f, const HTypeStructure& s, const SpectralGrid& sg) {
  return std::move(forward_batch({&f}, s, sg)[0]);
}

std::vector<SpaceField> inverse_batch(const std::vector<const SpectralCoeffs*>& Fs,
                                      const HTypeStructure& s) {
  if (Fs.empty()) return {};
  for (const auto* F : Fs)
    if (!(F->grid == Fs[0]->grid) || F->sg.nodes.size() != Fs[0]->sg.nodes.size())
      throw std::invalid_argument("inverse_batch: mismatched coefficient sets");
  std::vector<SpectralCoeffs> none;
  std::vector<SpaceField> out;
  gft_sweep(s, Fs[0]->sg, Fs[0]->grid, {}, &none, Fs, &out);
  return out;
}

SpaceField inverse(const SpectralCoeffs& F, const HTypeStructure& s) {
  return std::move(inverse_batch({&F}, s)[0]);
}

double plancherel_norm(const SpectralCoeffs& F) {
  double s = 0;
  for (std::size_t w = 0; w < F.sg.nodes.size(); ++w)
    s += F.sg.nodes[w].weight * std::pow(F.sg.nodes[w].lam.norm(), F.sg.d) *
         F.blocks[w].squaredNorm();
  return std::sqrt(std::pow(2.0 * M_PI, -(F.sg.d + F.sg.m)) * s);
}

SpectralCoeffs apply_multiplier(const SpectralCoeffs& F, const std::function<cplx(double)>& phi) {
  SpectralCoeffs out = F;
  const int d = F.sg.d;
  for (std::size_t w = 0; w < F.sg.nodes.size(); ++w) {
    const double la = F.sg.nodes[w].lam.norm();
    for (std::size_t a = 0; a < F.sg.nidx(); ++a)
      out.blocks[w].row(a) *= phi(la * (2.0 * multi_order(F.sg.idx[a]) + d));
  }
  return out;
}

double sobolev_norm(const SpectralCoeffs& F, double sigma) {
  if (sigma < 0 && !(F.sg.lam_min > 0))
    throw std::invalid_argument("sobolev_norm: sigma < 0 needs lam_min > 0");
  return plancherel_norm(
      apply_multiplier(F, [sigma](double mu) { return cplx(std::pow(mu, 0.5 * sigma), 0.0); }));
}

double real_symmetry_residual(const SpectralCoeffs& F) {
  if (F.sg.m != 1) throw std::invalid_argument("real_symmetry_residual: m = 1 only");
  double worst = 0, scale = 0;
  for (std::size_t w = 0; w + 1 < F.sg.nodes.size(); w += 2) {
    // nodes come in (+rho, -rho) pairs by construction
    worst = std::max(worst, (F.blocks[w + 1] - F.blocks[w].conjugate()).cwiseAbs().maxCoeff());
    scale = std::max({scale, F.blocks[w].cwiseAbs().maxCoeff(),
                      F.blocks[w + 1].cwiseAbs().maxCoeff()});
  }
  return scale > 0 ? worst / scale : 0.0;
}

namespace {

void put_f64(std::ofstream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_i32(std::ofstream& os, std::int32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_u32(std::ofstream& os, std::uint32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
double get_f64(std::ifstream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
std::int32_t get_i32(std::ifstream& is) {
  std::int32_t v;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
std::uint32_t get_u32(std::ifstream& is) {
  std::uint32_t v;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}

}  // namespace

void save_coeffs(const SpectralCoeffs& F, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_coeffs: cannot open " + path);
  os.write("HTGSPEC1", 8);
  put_i32(os, F.sg.d);
  put_i32(os, F.sg.m);
  put_i32(os, F.sg.N_max);
  put_u32(os, static_cast<std::uint32_t>(F.sg.nodes.size()));
  put_u32(os, static_cast<std::uint32_t>(F.sg.nidx()));
  for (const auto& node : F.sg.nodes) {
    for (int j = 0; j < F.sg.m; ++j) put_f64(os, node.lam(j));
    put_f64(os, node.weight);
  }
  for (const auto& B : F.blocks)
    for (Eigen::Index a = 0; a < B.rows(); ++a)
      for (Eigen::Index b = 0; b < B.cols(); ++b) {
        put_f64(os, B(a, b).real());
        put_f64(os, B(a, b).imag());
      }
  nlohmann::json side = {
      {"d", F.sg.d},
      {"m", F.sg.m},
      {"N_max", F.sg.N_max},
      {"lam_min", F.sg.lam_min},
      {"lam_max", F.sg.lam_max},
      {"grid",
       {{"n_x", F.grid.xaxis.n},
        {"L_x", F.grid.xaxis.L},
        {"n_z", F.grid.zaxis.n},
        {"L_z", F.grid.zaxis.L}}},
      {"top_shell_fraction", F.top_shell_fraction},
  };
  std::ofstream(path + ".json") << side.dump(2) << "\n";
}

SpectralCoeffs load_coeffs(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_coeffs: cannot open " + path);
  char magic[8];
  is.read(magic, 8);
  if (std::memcmp(magic, "HTGSPEC1", 8) != 0) throw std::runtime_error("load_coeffs: bad magic");
  SpectralCoeffs F;
  F.sg.d = get_i32(is);
  F.sg.m = get_i32(is);
  F.sg.N_max = get_i32(is);
  const std::uint32_t nn = get_u32(is), ni = get_u32(is);
  F.sg.idx = multi_indices_up_to(F.sg.d, F.sg.N_max);
  if (F.sg.idx.size() != ni) throw std::runtime_error("load_coeffs: index count mismatch");
  F.sg.nodes.resize(nn);
  for (auto& node : F.sg.nodes) {
    node.lam.resize(F.sg.m);
    for (int j = 0; j < F.sg.m; ++j) node.lam(j) = get_f64(is);
    node.weight = get_f64(is);
  }
  F.blocks.assign(nn, Eigen::MatrixXcd(ni, ni));
  for (auto& B : F.blocks)
    for (std::uint32_t a = 0; a < ni; ++a)
      for (std::uint32_t b = 0; b < ni; ++b) {
        const double re = get_f64(is), im = get_f64(is);
        B(a, b) = cplx(re, im);
      }
  if (!is) throw std::runtime_error("load_coeffs: truncated file");
  std::ifstream sf(path + ".json");
  if (sf) {
    nlohmann::json side;
    sf >> side;
    F.sg.lam_min = side.value("lam_min", 0.0);
    F.sg.lam_max = side.value("lam_max", 0.0);
    F.top_shell_fraction = side.value("top_shell_fraction", 0.0);
    if (side.contains("grid")) {
      F.grid.d = F.sg.d;
      F.grid.m = F.sg.m;
      F.grid.xaxis = {side["grid"]["n_x"], side["grid"]["L_x"]};
      F.grid.zaxis = {side["grid"]["n_z"], side["grid"]["L_z"]};
    }
  }
  return F;
}

}  // namespace htg
