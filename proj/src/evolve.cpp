#include "evolve.hpp"

#include <cmath>
#include <stdexcept>

#include "quadrature.hpp"
#include "special.hpp"
#include "util/parallel.hpp"

namespace htg {

namespace {

std::size_t ipow(int n, int e) {
  std::size_t s = 1;
  for (int i = 0; i < e; ++i) s *= n;
  return s;
}

double block_weight(const SpectralGrid& sg, std::size_t w) {
  return sg.nodes[w].weight * std::pow(sg.nodes[w].lam.norm(), sg.d);
}

// per-row mu = |lambda| (2 |alpha| + d) (the multiplier acts on the first index)
double row_mu(const SpectralGrid& sg, std::size_t w, std::size_t a) {
  return sg.nodes[w].lam.norm() * (2.0 * multi_order(sg.idx[a]) + sg.d);
}

SpaceTimeField assemble(const std::vector<const SpectralCoeffs*>& Fs, double T, int nt,
                        const HTypeStructure& s) {
  auto slices = inverse_batch(Fs, s);
  SpaceTimeField u;
  u.T = T;
  u.nt = nt;
  u.grid = slices.front().grid;
  u.samples.resize(std::size_t(nt) * u.grid.size());
  for (int i = 0; i < nt; ++i)
    std::copy(slices[i].samples.begin(), slices[i].samples.end(),
              u.samples.begin() + std::size_t(i) * u.grid.size());
  return u;
}

// trigonometric interpolation weights for the uniform grid t_i = i T / nt at
// an off-grid time t (frequency band j in [-nt/2, nt/2), as in restriction)
Eigen::VectorXcd trig_interp_weights(double T, int nt, double t) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(nt);
  for (int j = -nt / 2; j < nt - nt / 2; ++j) {
    const double nu = 2.0 * M_PI * j / T;
    for (int i = 0; i < nt; ++i) c(i) += std::polar(1.0 / nt, nu * (t - i * T / nt));
  }
  return c;
}

// C^inf transition rising from 0 at u = 0 to 1 at u = 1
double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

}  // namespace

SpectralCoeffs schrodinger_multiplier(const SpectralCoeffs& F, double t) {
  return apply_multiplier(F, [t](double mu) { return std::polar(1.0, mu * t); });
}

SpaceTimeField schrodinger_propagate(const SpaceField& u0, double T, int nt,
                                     const HTypeStructure& s, const SpectralGrid& sg) {
  if (nt < 1) throw std::invalid_argument("schrodinger_propagate: nt >= 1");
  const auto F = forward(u0, s, sg);
  std::vector<SpectralCoeffs> Ft(nt);
  std::vector<const SpectralCoeffs*> ptrs(nt);
  for (int i = 0; i < nt; ++i) {
    Ft[i] = schrodinger_multiplier(F, i * T / nt);
    ptrs[i] = &Ft[i];
  }
  return assemble(ptrs, T, nt, s);
}

std::vector<SpaceField> schrodinger_at(const SpectralCoeffs& F, const std::vector<double>& times,
                                       const HTypeStructure& s) {
  std::vector<SpectralCoeffs> Ft(times.size());
  std::vector<const SpectralCoeffs*> ptrs(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    Ft[i] = schrodinger_multiplier(F, times[i]);
    ptrs[i] = &Ft[i];
  }
  return inverse_batch(ptrs, s);
}

WaveResult wave_propagate(const WaveData& data, double T, int nt, const HTypeStructure& s,
                          const SpectralGrid& sg) {
  SpectralCoeffs V0;
  if (!data.v0.samples.empty()) {
    if (!(data.v0.grid == data.u0.grid))
      throw std::invalid_argument("wave_propagate: u0 / v0 grid mismatch");
    V0 = forward(data.v0, s, sg);
  }
  return wave_propagate_coeffs(forward(data.u0, s, sg), V0, T, nt, s);
}

WaveResult wave_propagate_coeffs(const SpectralCoeffs& F, const SpectralCoeffs& V0, double T,
                                 int nt, const HTypeStructure& s) {
  if (nt < 1) throw std::invalid_argument("wave_propagate: nt >= 1");
  const auto& sg = F.sg;
  SpectralCoeffs Gp = F, Gm = F;  // Gamma_{+-}
  if (!V0.blocks.empty()) {
    const auto V = apply_multiplier(V0, [](double mu) {
      return 1.0 / (cplx(0.0, 1.0) * std::sqrt(mu));
    });
    for (std::size_t w = 0; w < F.blocks.size(); ++w) {
      Gp.blocks[w] = 0.5 * (F.blocks[w] + V.blocks[w]);
      Gm.blocks[w] = 0.5 * (F.blocks[w] - V.blocks[w]);
    }
  } else {
    for (std::size_t w = 0; w < F.blocks.size(); ++w) {
      Gp.blocks[w] *= 0.5;
      Gm.blocks[w] *= 0.5;
    }
  }

  WaveResult out;
  out.energy.resize(nt);
  std::vector<SpectralCoeffs> Ut(nt);
  std::vector<const SpectralCoeffs*> ptrs(nt);
  const double pref = std::pow(2.0 * M_PI, -(sg.d + sg.m));
  for (int i = 0; i < nt; ++i) {
    const double t = i * T / nt;
    Ut[i] = F;  // shape carrier
    double energy = 0.0;
    for (std::size_t w = 0; w < F.blocks.size(); ++w) {
      const double bw = block_weight(sg, w);
      for (std::size_t a = 0; a < sg.nidx(); ++a) {
        const double mu = row_mu(sg, w, a);
        const cplx ep = std::polar(1.0, t * std::sqrt(mu));
        const auto A = (ep * Gp.blocks[w].row(a)).eval();
        const auto B = (std::conj(ep) * Gm.blocks[w].row(a)).eval();
        Ut[i].blocks[w].row(a) = A + B;
        // |d_t C|^2 + mu |C|^2 with d_t C = i sqrt(mu) (A - B)
        energy += bw * mu * ((A - B).squaredNorm() + (A + B).squaredNorm());
      }
    }
    out.energy[i] = pref * energy;
    ptrs[i] = &Ut[i];
  }
  out.field = assemble(ptrs, T, nt, s);
  return out;
}

DuhamelResult duhamel(const SpaceTimeField& f, const HTypeStructure& s, const SpectralGrid& sg,
                      int n_quad, bool with_residual) {
  const int nt = f.nt;
  const std::size_t npt = f.grid.size();
  std::vector<SpaceField> slices(nt);
  std::vector<const SpaceField*> sptr(nt);
  for (int i = 0; i < nt; ++i) {
    slices[i].grid = f.grid;
    slices[i].samples.assign(f.samples.begin() + std::size_t(i) * npt,
                             f.samples.begin() + std::size_t(i + 1) * npt);
    sptr[i] = &slices[i];
  }
  const auto Fs = forward_batch(sptr, s, sg);

  std::vector<SpectralCoeffs> C(nt);
  std::vector<const SpectralCoeffs*> cptr(nt);
  for (int j = 0; j < nt; ++j) {
    C[j] = Fs[0];
    for (auto& blk : C[j].blocks) blk.setZero();
    cptr[j] = &C[j];
  }
  parallel_for(nt, [&](std::size_t jj) {
    const int j = int(jj);
    const double tj = f.time(j);
    if (tj == 0.0) return;
    const auto gl = gauss_legendre(n_quad, 0.0, tj);
    for (int q = 0; q < n_quad; ++q) {
      const double tp = gl.nodes[q];
      const auto ci = trig_interp_weights(f.T, nt, tp);
      for (std::size_t w = 0; w < C[j].blocks.size(); ++w) {
        Eigen::MatrixXcd interp = Eigen::MatrixXcd::Zero(C[j].blocks[w].rows(),
                                                         C[j].blocks[w].cols());
        for (int i = 0; i < nt; ++i) interp.noalias() += ci(i) * Fs[i].blocks[w];
        for (std::size_t a = 0; a < sg.nidx(); ++a) {
          const cplx phase =
              cplx(0.0, -1.0) * gl.weights[q] * std::polar(1.0, row_mu(sg, w, a) * (tj - tp));
          C[j].blocks[w].row(a) += phase * interp.row(a);
        }
      }
    }
  });

  DuhamelResult out;
  out.field = assemble(cptr, f.T, nt, s);
  if (with_residual && nt >= 5) {
    // i d_t C + mu C should reproduce fhat; 4th-order differences need the
    // four-sample collar, so only interior times enter
    const double dt = f.dt();
    double num = 0, den = 0;
    for (int j = 2; j < nt - 2; ++j) {
      for (std::size_t w = 0; w < C[j].blocks.size(); ++w) {
        const double bw = block_weight(sg, w);
        const Eigen::MatrixXcd dC = (-C[j + 2].blocks[w] + 8.0 * C[j + 1].blocks[w] -
                                     8.0 * C[j - 1].blocks[w] + C[j - 2].blocks[w]) /
                                    (12.0 * dt);
        for (std::size_t a = 0; a < sg.nidx(); ++a) {
          const double mu = row_mu(sg, w, a);
          num += bw * (cplx(0, 1) * dC.row(a) + mu * C[j].blocks[w].row(a) -
                       Fs[j].blocks[w].row(a))
                          .squaredNorm();
          den += bw * Fs[j].blocks[w].row(a).squaredNorm();
        }
      }
    }
    out.residual = std::sqrt(num / den);
  }
  return out;
}

double LocalizationSpec::operator()(double mu) const {
  if (!(0.0 < flat_lo && flat_lo < flat_hi && flat_hi < outer) || Lam <= 0.0)
    throw std::invalid_argument("LocalizationSpec: need 0 < flat_lo < flat_hi < outer");
  if (kind == Kind::annulus && !(0.0 < inner && inner < flat_lo))
    throw std::invalid_argument("LocalizationSpec: annulus needs 0 < inner < flat_lo");
  const double u = mu / (Lam * Lam);
  if (u >= flat_hi) return 1.0 - smoothstep((u - flat_hi) / (outer - flat_hi));
  if (kind == Kind::ball) return 1.0;
  return smoothstep((u - inner) / (flat_lo - inner));
}

SpectralCoeffs localize_coeffs(const SpectralCoeffs& F, const LocalizationSpec& spec) {
  return apply_multiplier(F, [&spec](double mu) { return cplx(spec(mu), 0.0); });
}

SpaceField frequency_localize(const SpaceField& u0, const LocalizationSpec& spec,
                              const HTypeStructure& s, const SpectralGrid& sg) {
  return inverse(localize_coeffs(forward(u0, s, sg), spec), s);
}

SpaceField horizontal_derivative(const SpaceField& f, int axis, const HTypeStructure& s) {
  const auto& g = f.grid;
  if (axis < 0 || axis >= 2 * g.d)
    throw std::invalid_argument("horizontal_derivative: axis out of range");
  const std::size_t nz = g.n_z();
  const int nx = g.xaxis.n, nzn = g.zaxis.n;
  const double hx = g.xaxis.h(), hz = g.zaxis.h();
  const std::size_t xstride = ipow(nx, 2 * g.d - 1 - axis) * nz;  // last axis fastest

  SpaceField out;
  out.grid = g;
  out.samples.assign(f.samples.size(), cplx(0, 0));
  parallel_for(g.n_x(), [&](std::size_t xf) {
    // decode the axis coordinate and the first-order z coefficients
    std::size_t r = xf;
    int coord = 0;
    for (int a = 2 * g.d - 1; a >= 0; --a) {
      if (a == axis) coord = int(r % nx);
      r /= nx;
    }
    const Eigen::VectorXd x = g.xpoint(xf);
    Eigen::VectorXd zc(g.m);  // (1/2) ((L^a)^T x)_axis per vertical direction
    for (int a = 0; a < g.m; ++a) zc(a) = 0.5 * (s.brackets[a].transpose() * x)(axis);

    const std::size_t base = xf * nz;
    auto xs = [&](int off, std::size_t zf) -> cplx {
      const int c = coord + off;
      if (c < 0 || c >= nx) return cplx(0, 0);
      return f.samples[base + std::ptrdiff_t(off) * std::ptrdiff_t(xstride) + zf];
    };
    for (std::size_t zf = 0; zf < nz; ++zf) {
      cplx v = (-xs(2, zf) + 8.0 * xs(1, zf) - 8.0 * xs(-1, zf) + xs(-2, zf)) / (12.0 * hx);
      // z part, axis by axis (last z axis fastest)
      std::size_t rz = zf, zstride = 1;
      for (int a = g.m - 1; a >= 0; --a) {
        const int cz = int(rz % nzn);
        rz /= nzn;
        if (zc(a) != 0.0) {
          auto zsample = [&](int off) -> cplx {
            const int c = cz + off;
            if (c < 0 || c >= nzn) return cplx(0, 0);
            return f.samples[base + zf + std::ptrdiff_t(off) * std::ptrdiff_t(zstride)];
          };
          v += zc(a) * (-zsample(2) + 8.0 * zsample(1) - 8.0 * zsample(-1) + zsample(-2)) /
               (12.0 * hz);
        }
        zstride *= nzn;
      }
      out.samples[base + zf] = v;
    }
  });
  return out;
}

SpaceField fractional_laplacian(const SpaceField& f, double sigma, const HTypeStructure& s,
                                const SpectralGrid& sg) {
  if (sigma < 0 && !(sg.lam_min > 0))
    throw std::invalid_argument("fractional_laplacian: sigma < 0 needs lam_min > 0");
  return inverse(apply_multiplier(forward(f, s, sg),
                                  [sigma](double mu) {
                                    return cplx(std::pow(mu, 0.5 * sigma), 0.0);
                                  }),
                 s);
}

double space_lp_norm(const SpaceField& f, double p) {
  if (p < 1.0) throw std::invalid_argument("space_lp_norm: p >= 1");
  if (std::isinf(p)) {
    double m = 0;
    for (const cplx& v : f.samples) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0;
  for (const cplx& v : f.samples) acc += std::pow(std::abs(v), p);
  return std::pow(f.grid.cell() * acc, 1.0 / p);
}

double bernstein_ratio(const SpaceField& f, const std::vector<int>& beta, double p, double q,
                       double Lam, const HTypeStructure& s) {
  if (beta.size() != std::size_t(2 * f.grid.d))
    throw std::invalid_argument("bernstein_ratio: beta needs one entry per horizontal axis");
  if (!(1.0 <= p && p <= q)) throw std::invalid_argument("bernstein_ratio: need 1 <= p <= q");
  SpaceField g = f;
  int order = 0;
  for (int axis = 0; axis < 2 * f.grid.d; ++axis)
    for (int r = 0; r < beta[axis]; ++r) {
      g = horizontal_derivative(g, axis, s);
      ++order;
    }
  const double Q = f.grid.d * 2.0 + f.grid.m * 2.0;
  const double scale = std::pow(Lam, order + Q * (1.0 / p - 1.0 / q));
  return space_lp_norm(g, q) / (scale * space_lp_norm(f, p));
}

}  // namespace htg
