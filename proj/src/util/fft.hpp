#pragma once

// Minimal power-of-two complex FFT, enough for the zero-padded space-time
// convolutions in the fan module.  Self-contained so results are bitwise
// reproducible regardless of external library versions.

#include <complex>
#include <vector>

namespace htg {

using cplx = std::complex<double>;

bool is_pow2(std::size_t n);

// In-place radix-2 FFT; sign=-1 forward (e^{-i...}), sign=+1 inverse
// (unscaled; caller divides by n).
void fft_pow2(std::vector<cplx>& a, int sign);

std::vector<cplx> fft(const std::vector<cplx>& a, int sign);

}  // namespace htg
