#pragma once

// Schrodinger and wave propagators as spectral multipliers, Duhamel
// inhomogeneous terms, frequency localization (Littlewood-Paley pieces) and
// Bernstein ratios for the left-invariant horizontal derivatives.
//
// Propagation is exclusively spectral: u(t) = inverse(multiplier * forward),
// so all discretization error lives in the transform pair.  Time stepping
// appears only inside residual oracles.

#include "gft.hpp"

namespace htg {

// e^{i mu t} on coefficients: the flow of i d_t u = Delta_H u
SpectralCoeffs schrodinger_multiplier(const SpectralCoeffs& F, double t);

// u(t_i) on the uniform grid t_i = i T / nt, u(0) = u0
SpaceTimeField schrodinger_propagate(const SpaceField& u0, double T, int nt,
                                     const HTypeStructure& s, const SpectralGrid& sg);
// the same flow sampled at arbitrary times from precomputed coefficients
std::vector<SpaceField> schrodinger_at(const SpectralCoeffs& F, const std::vector<double>& times,
                                       const HTypeStructure& s);

// initial position / velocity; empty v0.samples means zero velocity
struct WaveData {
  SpaceField u0;
  SpaceField v0;
};

struct WaveResult {
  SpaceTimeField field;  // u(t_i)
  // spectral energy ||d_t u||_2^2 + ||grad_H u||_2^2 at each t_i, evaluated
  // with the time phases in place (conservation is a measurement, not an
  // assumption)
  std::vector<double> energy;
};

// u(t) = sum_{+-} e^{+- i t sqrt(mu)} Gamma_{+-},
// Gamma_{+-} = (F(u0) +- (i sqrt(mu))^{-1} F(v0)) / 2
WaveResult wave_propagate(const WaveData& data, double T, int nt, const HTypeStructure& s,
                          const SpectralGrid& sg);
// the same flow from coefficient data (V0 with empty blocks means zero
// velocity); lets pure modes bypass the forward-transform leakage
WaveResult wave_propagate_coeffs(const SpectralCoeffs& U0, const SpectralCoeffs& V0, double T,
                                 int nt, const HTypeStructure& s);

struct DuhamelResult {
  SpaceTimeField field;   // -i int_0^t U(t - t') f(t') dt'
  // relative L2 residual of i d_t u + mu u - fhat in coefficient space,
  // 4th-order time differences over interior times; measures the t'
  // quadrature plus the time-interpolation error of f
  double residual = 0.0;
};

// Gauss-Legendre in t' on [0, t_i] per output time; f(t') interpolated
// trigonometrically from the uniform time grid (f must be time-resolved)
DuhamelResult duhamel(const SpaceTimeField& f, const HTypeStructure& s, const SpectralGrid& sg,
                      int n_quad = 32, bool with_residual = true);

// Littlewood-Paley profile phi(mu / Lam^2): C^inf, identically 1 on
// [flat_lo, flat_hi], supported in [inner, outer] (annulus) or [0, outer]
// (ball); all breakpoints in the rescaled variable s = mu / Lam^2.
struct LocalizationSpec {
  enum class Kind { ball, annulus };
  Kind kind = Kind::annulus;
  double Lam = 1.0;
  double inner = 0.5, flat_lo = 0.85, flat_hi = 1.15, outer = 2.0;

  double operator()(double mu) const;  // validates the breakpoint ordering
};

SpectralCoeffs localize_coeffs(const SpectralCoeffs& F, const LocalizationSpec& spec);
SpaceField frequency_localize(const SpaceField& u0, const LocalizationSpec& spec,
                              const HTypeStructure& s, const SpectralGrid& sg);

// Left-invariant horizontal derivative X_axis f by 4th-order centered
// differences (zero beyond the box): X_i = d_{x_i} + (1/2) sum_a
// ((L^a)^T x)_i d_{z_a}; on the Heisenberg group the first d axes give
// d_{x_i} - (1/2) y_i d_z and the last d give d_{y_i} + (1/2) x_i d_z.
SpaceField horizontal_derivative(const SpaceField& f, int axis, const HTypeStructure& s);

// (-Delta_H)^{sigma/2} through the mu^{sigma/2} multiplier
SpaceField fractional_laplacian(const SpaceField& f, double sigma, const HTypeStructure& s,
                                const SpectralGrid& sg);

double space_lp_norm(const SpaceField& f, double p);  // p in [1, inf]

// ||X^beta f||_q / (Lam^{|beta| + Q (1/p - 1/q)} ||f||_p) for f localized at
// scale Lam; beta has one entry per horizontal axis, Q = 2d + 2m.
double bernstein_ratio(const SpaceField& f, const std::vector<int>& beta, double p, double q,
                       double Lam, const HTypeStructure& s);

}  // namespace htg
