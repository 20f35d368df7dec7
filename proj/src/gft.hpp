#pragma once

// Group Fourier transform on G: scalar coefficients F(lambda, alpha, beta),
// inversion, Plancherel, spectral multipliers in Delta_H, and Sobolev norms.
// The lambda-quadrature is polar: radial Gauss-Legendre on [lam_min, lam_max]
// tensor a sphere rule on S^{m-1} ({+1,-1} with counting measure for m = 1,
// a 26-point Lebedev rule for m = 3).

#include <functional>
#include <string>
#include <vector>

#include "etable.hpp"
#include "structure.hpp"
#include "twisted.hpp"

namespace htg {

struct SpaceGrid {
  int d = 1, m = 1;
  Axis xaxis;  // each of the 2d horizontal axes
  Axis zaxis;  // each of the m vertical axes

  std::size_t n_x() const;
  std::size_t n_z() const;
  std::size_t size() const { return n_x() * n_z(); }
  double xcell() const { return std::pow(xaxis.h(), 2 * d); }
  double zcell() const { return std::pow(zaxis.h(), m); }
  double cell() const { return xcell() * zcell(); }
  Eigen::VectorXd xpoint(std::size_t xf) const;
  Eigen::VectorXd zpoint(std::size_t zf) const;
  bool operator==(const SpaceGrid& o) const;
};

// f(x, z) sampled over the grid; index = xflat * n_z() + zflat.
struct SpaceField {
  SpaceGrid grid;
  std::vector<cplx> samples;

  static SpaceField from_function(
      const SpaceGrid& g,
      const std::function<cplx(const Eigen::VectorXd&, const Eigen::VectorXd&)>& f);
  cplx& at(std::size_t xf, std::size_t zf) { return samples[xf * grid.n_z() + zf]; }
  const cplx& at(std::size_t xf, std::size_t zf) const { return samples[xf * grid.n_z() + zf]; }
  double l2_norm() const;
  double boundary_ratio() const;  // max |f| on any grid face over max |f|
};

// u(t, x, z) on [0, T) sampled at t_i = i T / nt; index = t * grid.size() + space.
struct SpaceTimeField {
  double T = 4.0;
  int nt = 64;
  SpaceGrid grid;
  std::vector<cplx> samples;

  double dt() const { return T / nt; }
  double time(int i) const { return i * dt(); }
};

struct LambdaNode {
  Eigen::VectorXd lam;  // in v* \ {0}
  double weight;        // Lebesgue d(lambda) weight (radial x sphere x rho^{m-1})
};

struct SpectralGrid {
  int d = 1, m = 1, N_max = 32;
  double lam_min = 0.05, lam_max = 8.0;
  std::vector<LambdaNode> nodes;
  std::vector<MultiIndex> idx;  // all |alpha| <= N_max, the block index set
  std::size_t nidx() const { return idx.size(); }
};

SpectralGrid make_spectral_grid(int d, int m, int N_max, double lam_min = 0.05,
                                double lam_max = 8.0, int n_rad = 48);

// Unit-sphere rule in v*: {+1, -1} with counting measure (vol 2) for m = 1, the
// 26-point Lebedev rule (weights summing to 4 pi) for m = 3.
std::vector<std::pair<Eigen::VectorXd, double>> sphere_rule(int m);

struct SpectralCoeffs {
  SpectralGrid sg;
  SpaceGrid grid;  // source-grid metadata (inversion target, sidecar)
  std::vector<Eigen::MatrixXcd> blocks;  // per node, nidx x nidx, F(lam; alpha, beta)
  // Plancherel mass fraction on the top Hermite shell (|alpha| or |beta| = N_max):
  // the measured N_max truncation proxy; warning flagged above 1e-4
  double top_shell_fraction = 0.0;
  bool truncation_warning = false;
};

// f^lambda(x) = int f(x, z) e^{-i lambda . z} dz (semidiscrete; lambda need not
// be a DFT frequency).  Throws when some |lambda_j| exceeds the z Nyquist band.
TwistedField central_ft(const SpaceField& f, const DualFrequency& lam);

// F(lambda, alpha, beta) = int_G f E_{alpha beta}^lambda.  Batch versions share
// the per-node basis evaluation, the dominant cost.
std::vector<SpectralCoeffs> forward_batch(const std::vector<const SpaceField*>& fs,
                                          const HTypeStructure& s, const SpectralGrid& sg);
SpectralCoeffs forward(const SpaceField& f, const HTypeStructure& s, const SpectralGrid& sg);

std::vector<SpaceField> inverse_batch(const std::vector<const SpectralCoeffs*>& Fs,
                                      const HTypeStructure& s);
SpaceField inverse(const SpectralCoeffs& F, const HTypeStructure& s);

// ((2 pi)^{-d-m} sum_nodes w |lam|^d sum_{alpha beta} |F|^2)^{1/2}
double plancherel_norm(const SpectralCoeffs& F);

// F(lam, alpha, beta) -> phi(|lam| (2|alpha| + d)) F(lam, alpha, beta)
SpectralCoeffs apply_multiplier(const SpectralCoeffs& F, const std::function<cplx(double)>& phi);

// homogeneous H^sigma: Plancherel norm of the multiplier mu^{sigma/2}
double sobolev_norm(const SpectralCoeffs& F, double sigma);

// max |F(-lam) - conj(F(lam))| over paired nodes, relative to max |F|; the
// reality symmetry of coefficients of a real field (m = 1 grids only).
double real_symmetry_residual(const SpectralCoeffs& F);

// Binary layout: magic "HTGSPEC1", then i32 d, m, N_max, u32 node count, u32
// nidx; per node m+1 little-endian f64 (lambda, weight); then per node the
// row-major nidx x nidx complex block as f64 (re, im) pairs.  A JSON sidecar
// at path + ".json" records the grid metadata.
void save_coeffs(const SpectralCoeffs& F, const std::string& path);
SpectralCoeffs load_coeffs(const std::string& path);

}  // namespace htg
