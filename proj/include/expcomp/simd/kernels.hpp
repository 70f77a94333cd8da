#pragma once

// Data-parallel inner loops of the profile-likelihood search.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The active table is chosen once at startup from CPUID and can be
// overridden (tests, `--isa`). Variants are equivalence-tested against the
// scalar reference in tests/test_kernels.cpp.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace expcomp::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

/// θ(m) = (p·S_m + q·m + r) / (u·S_m + v·m + w); linear-fractional profile
/// estimate of the breakpoint given prefix sum S_m of the first m order
/// statistics' transformed values.
struct LinearFractional {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
};

struct KernelTable {
  Isa isa;

  /// out[i] = exp(scale · x[i]).
  void (*scaled_exp)(std::span<const double> x, double scale, std::span<double> out);

  /// Smallest m in [1, n-1] (1-based split index) with positive denominator
  /// and powers[m-1] <= θ(m) <= powers[m]; prefix[m-1] holds S_m.
  std::optional<std::size_t> (*first_bracketed)(std::span<const double> prefix,
                                                std::span<const double> powers,
                                                const LinearFractional& f);

  /// Σ x[i] accumulated in four interleaved lanes, lanes combined as
  /// (l0 + l1) + (l2 + l3), then the remainder in order.
  double (*lane_sum)(std::span<const double> x);
};

bool isa_supported(Isa isa);
Isa detected_isa();

const KernelTable& kernels_for(Isa isa);

/// Currently selected table (initialized to detected_isa()).
const KernelTable& active_kernels();

/// Selects the active table; throws std::invalid_argument when unsupported.
void select_isa(Isa isa);

namespace scalar {
void scaled_exp(std::span<const double> x, double scale, std::span<double> out);
std::optional<std::size_t> first_bracketed(std::span<const double> prefix,
                                           std::span<const double> powers,
                                           const LinearFractional& f);
double lane_sum(std::span<const double> x);
}  // namespace scalar

#if defined(EXPCOMP_HAVE_AVX2)
namespace avx2 {
void scaled_exp(std::span<const double> x, double scale, std::span<double> out);
std::optional<std::size_t> first_bracketed(std::span<const double> prefix,
                                           std::span<const double> powers,
                                           const LinearFractional& f);
double lane_sum(std::span<const double> x);
}  // namespace avx2
#endif

}  // namespace expcomp::simd
