#include <cmath>

#include "expcomp/simd/kernels.hpp"

// Built with -ffp-contract=off so that the AVX2 variants, which spell out the
// same multiply/add order, reproduce these results bit for bit where they
// share arithmetic.

namespace expcomp::simd::scalar {

void scaled_exp(std::span<const double> x, double scale, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::exp(scale * x[i]);
}

std::optional<std::size_t> first_bracketed(std::span<const double> prefix,
                                           std::span<const double> powers,
                                           const LinearFractional& f) {
  const std::size_t n = powers.size();
  for (std::size_t m = 1; m < n; ++m) {
    const double s = prefix[m - 1];
    const double md = static_cast<double>(m);
    const double num = (f.p * s + f.q * md) + f.r;
    const double den = (f.u * s + f.v * md) + f.w;
    if (!(den > 0.0)) continue;
    const double theta = num / den;
    if (powers[m - 1] <= theta && theta <= powers[m]) return m;
  }
  return std::nullopt;
}

double lane_sum(std::span<const double> x) {
  double lanes[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t blocks = x.size() / 4;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t j = 0; j < 4; ++j) lanes[j] += x[4 * b + j];
  }
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (std::size_t i = 4 * blocks; i < x.size(); ++i) total += x[i];
  return total;
}

}  // namespace expcomp::simd::scalar
