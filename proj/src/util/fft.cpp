#include "util/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace htg {

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

void fft_pow2(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft_pow2: size must be a power of two");
  // bit reversal
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        cplx u = a[i + j];
        cplx v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<cplx> fft(const std::vector<cplx>& a, int sign) {
  std::vector<cplx> out = a;
  fft_pow2(out, sign);
  return out;
}

}  // namespace htg
