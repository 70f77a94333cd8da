#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "expcomp/estimation.hpp"
#include "expcomp/simd/kernels.hpp"

using namespace expcomp;
using namespace expcomp::simd;

namespace {

std::vector<Isa> available() {
  std::vector<Isa> out{Isa::Scalar};
  if (isa_supported(Isa::Avx2)) out.push_back(Isa::Avx2);
  return out;
}

std::vector<double> uniform(std::size_t n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = u(gen);
  return out;
}

// Straightforward restatement of the bracket search used as the oracle.
std::optional<std::size_t> bracket_oracle(const std::vector<double>& prefix,
                                          const std::vector<double>& powers,
                                          const LinearFractional& f) {
  for (std::size_t m = 1; m < powers.size(); ++m) {
    const double s = prefix[m - 1];
    const double den = (f.u * s + f.v * m) + f.w;
    if (den <= 0.0) continue;
    const double theta = ((f.p * s + f.q * m) + f.r) / den;
    if (powers[m - 1] <= theta && theta <= powers[m]) return m;
  }
  return std::nullopt;
}

struct IsaGuard {
  Isa saved = active_kernels().isa;
  ~IsaGuard() { select_isa(saved); }
};

}  // namespace

TEST_CASE("isa names round-trip and detection is consistent") {
  for (Isa isa : {Isa::Scalar, Isa::Avx2}) CHECK(parse_isa(isa_name(isa)) == isa);
  CHECK_FALSE(parse_isa("neon").has_value());
  CHECK(isa_supported(Isa::Scalar));
  CHECK(isa_supported(detected_isa()));
  CHECK(kernels_for(Isa::Scalar).isa == Isa::Scalar);
  if (!isa_supported(Isa::Avx2)) MESSAGE("AVX2 not available; equivalence tests cover scalar only");
}

TEST_CASE("select_isa switches the active table") {
  IsaGuard guard;
  for (Isa isa : available()) {
    select_isa(isa);
    CHECK(active_kernels().isa == isa);
  }
}

TEST_CASE("scaled_exp variants agree with std::exp") {
  for (Isa isa : available()) {
    CAPTURE(isa_name(isa));
    const auto& k = kernels_for(isa);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
      const auto x = uniform(n, -6.0, 6.0, 11 + n);
      for (double scale : {-20.0, -1.0, 0.05, 0.8, 5.0, 20.0}) {
        std::vector<double> got(n);
        k.scaled_exp(x, scale, got);
        for (std::size_t i = 0; i < n; ++i) {
          const double want = std::exp(scale * x[i]);
          REQUIRE(std::abs(got[i] - want) <= 2e-15 * want);
        }
      }
    }
  }
}

TEST_CASE("scaled_exp handles overflow, underflow and mixed lanes") {
  const std::vector<double> x{-800.0, -745.0, -708.5, 0.0, 709.5, 710.0, 1.0, -1.0, 700.0};
  for (Isa isa : available()) {
    CAPTURE(isa_name(isa));
    std::vector<double> got(x.size());
    kernels_for(isa).scaled_exp(x, 1.0, got);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double want = std::exp(x[i]);
      if (std::isinf(want) || want == 0.0) {
        CHECK(got[i] == want);
      } else {
        CHECK(std::abs(got[i] - want) <= 2e-15 * want);
      }
    }
  }
}

TEST_CASE("first_bracketed variants match the oracle on profile problems") {
  for (Isa isa : available()) {
    CAPTURE(isa_name(isa));
    const auto& k = kernels_for(isa);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const std::size_t n = 2 + seed % 61;
      auto y = uniform(n, 0.05, 6.0, seed);
      std::sort(y.begin(), y.end());
      std::vector<double> prefix(n);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) prefix[i] = s += y[i];
      // exp-Pareto shaped coefficients with a spread of tail weights
      const double alpha = 0.1 + 0.05 * static_cast<double>(seed % 13);
      LinearFractional f;
      f.p = alpha + 1.0;
      f.v = alpha + 1.0;
      f.w = -alpha * static_cast<double>(n);
      CHECK(k.first_bracketed(prefix, y, f) == bracket_oracle(prefix, y, f));
      // IG-Pareto shaped coefficients
      LinearFractional g;
      g.q = 0.14;
      g.r = 0.16 * static_cast<double>(n);
      g.u = 0.14;
      CHECK(k.first_bracketed(prefix, y, g) == bracket_oracle(prefix, y, g));
    }
  }
}

TEST_CASE("first_bracketed honours equality at both bracket ends") {
  // θ(m) = S_m / m (running mean); with ties the mean sits on an order statistic.
  const std::vector<double> powers{1.0, 1.0, 1.0, 4.0, 5.0};
  std::vector<double> prefix{1.0, 2.0, 3.0, 7.0, 12.0};
  LinearFractional f;
  f.p = 1.0;
  f.v = 1.0;
  for (Isa isa : available()) {
    CHECK(kernels_for(isa).first_bracketed(prefix, powers, f) == std::optional<std::size_t>{1});
  }
  const std::vector<double> two{1.0, 2.0};
  const std::vector<double> two_prefix{1.0, 3.0};
  LinearFractional never;
  never.r = 10.0;
  never.w = 1.0;
  for (Isa isa : available()) {
    CHECK_FALSE(kernels_for(isa).first_bracketed(two_prefix, two, never).has_value());
  }
}

TEST_CASE("lane_sum is bit-identical across variants") {
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 7u, 8u, 9u, 1001u}) {
    const auto x = uniform(n, -1e3, 1e3, 99 + n);
    double lanes[4] = {0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      for (std::size_t j = 0; j < 4; ++j) lanes[j] += x[i + j];
    }
    double want = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (; i < n; ++i) want += x[i];
    for (Isa isa : available()) {
      CAPTURE(isa_name(isa));
      CHECK(kernels_for(isa).lane_sum(x) == want);
    }
  }
}

TEST_CASE("fits agree across kernel variants") {
  IsaGuard guard;
  const auto truth = exp_exp_pareto(1.0, 0.8);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto y = truth.sample(150, seed);
    std::vector<FitResult> fits;
    for (Isa isa : available()) {
      select_isa(isa);
      fits.push_back(fit(ModelId::ExpExpPareto, y));
      fits.push_back(fit(ModelId::ExpIgPareto, y));
    }
    for (std::size_t i = 2; i < fits.size(); ++i) {
      const auto& a = fits[i % 2];
      const auto& b = fits[i];
      CHECK(a.eta == b.eta);
      CHECK(a.m == b.m);
      CHECK(b.theta == doctest::Approx(a.theta).epsilon(1e-12));
      CHECK(b.nll == doctest::Approx(a.nll).epsilon(1e-12));
    }
  }
}
