#pragma once

// Mixed Lebesgue norms L^r_v L^q_t L^p_h (outer-to-inner: vertical, time,
// horizontal), the admissible exponent sets and sigma exponents of the
// Strichartz estimates, ratio scans over exact dilation families, and the
// mixed-norm Hausdorff-Young check for the vertical Fourier transform.

#include "evolve.hpp"

namespace htg {

// infinite orders are grid maxima; finite orders are Riemann sums against the
// grid cell measures (time uses dt = T / nt on the [0, T) window)
struct MixedNormSpec {
  double r = std::numeric_limits<double>::infinity();  // vertical (outer)
  double q = 4.0;                                      // time
  double p = 4.0;                                      // horizontal (inner)
};

double mixed_norm(const SpaceTimeField& u, const MixedNormSpec& spec);

enum class Equation { schrodinger, wave };

struct AdmissibleResult {
  bool admissible = false;
  double sigma = 0.0;  // Q/2 - 2/q - 2d/p - 2m/r, resp. (Q-2)/2 - 1/q - ...
  std::vector<std::string> diagnostics;  // one entry per violated constraint
};

// Constraint set: p <= q, p <= r, r >= 2 + 4/(m-1) (m = 1 forces r = inf),
// (m, p) != (1, 2), and the scaling inequality sigma >= 0.
AdmissibleResult admissible_check(double p, double q, double r, int d, int m, Equation eq);

// || u ||_{mixed, [0, T)} / || u0 ||_{H^sigma}; for the wave flow (zero
// initial velocity) the data norm is H^{sigma + 1}, matching the
// (u0, v0) in H^{sigma+1} x H^sigma pairing of the wave estimate.
// Throws on zero data, inadmissible spec, or sigma below the critical value.
double strichartz_ratio(const SpaceField& u0, const MixedNormSpec& spec, Equation eq,
                        double sigma, double T, int nt, const HTypeStructure& s,
                        const SpectralGrid& sg);

struct DilationRow {
  double Lam = 1.0;
  double mixed = 0.0;   // mixed norm of the propagated dilated data
  double l2 = 0.0;      // L^2 norm of the dilated data (scales as Lam^{d+m})
  double hsigma = 0.0;  // data Sobolev norm entering the ratio
  double ratio = 0.0;   // mixed / hsigma
};

// u_{0,Lam}(x, z) = u0(x / Lam, z / Lam^2) realized as a verbatim sample copy
// on the enlarged grid, with the lambda grid scaled by Lam^{-2} and the time
// window by Lam^2 (Schrodinger) or Lam (wave): every entry of the table obeys
// its scaling exponent as an exact identity, not an approximation.
std::vector<DilationRow> dilation_scan(const SpaceField& u0, const std::vector<double>& Lams,
                                       const MixedNormSpec& spec, Equation eq, double sigma,
                                       double T, int nt, const HTypeStructure& s,
                                       const SpectralGrid& sg);

struct HYReport {
  double lhs = 0.0;   // || F_z f ||_{L^{b'}_lambda L^{a'}_{t,x}}, (2pi)^{-m} dlambda
  double rhs = 0.0;   // || f ||_{L^{b}_z L^{a'}_{t,x}}
  double ratio = 0.0; // lhs / rhs, <= 1 by the mixed Hausdorff-Young inequality
};

// Vertical Fourier transform on the z-DFT frequency comb (m = 1 only).
// Requires b <= min(a, a'): outside that range the Minkowski integral
// inequality underlying the interpolation fails, and the call is rejected.
HYReport hausdorff_young_check(const SpaceTimeField& f, double a, double b);

}  // namespace htg
