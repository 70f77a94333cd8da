#include <atomic>
#include <stdexcept>
#include <string>

#include "expcomp/simd/kernels.hpp"

namespace expcomp::simd {
namespace {

constexpr KernelTable kScalarTable{Isa::Scalar, &scalar::scaled_exp, &scalar::first_bracketed,
                                   &scalar::lane_sum};
#if defined(EXPCOMP_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::Avx2, &avx2::scaled_exp, &avx2::first_bracketed,
                                 &avx2::lane_sum};
#endif

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&kernels_for(detected_isa())};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  return std::nullopt;
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(EXPCOMP_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() { return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

const KernelTable& kernels_for(Isa isa) {
#if defined(EXPCOMP_HAVE_AVX2)
  if (isa == Isa::Avx2) return kAvx2Table;
#endif
  if (isa != Isa::Scalar) {
    throw std::invalid_argument("no kernels compiled for " + std::string(isa_name(isa)));
  }
  return kScalarTable;
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void select_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument(std::string(isa_name(isa)) + " is not supported on this CPU");
  }
  active_slot().store(&kernels_for(isa), std::memory_order_release);
}

}  // namespace expcomp::simd
