#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "expcomp/errors.hpp"
#include "expcomp/gof.hpp"

using namespace expcomp;

namespace {
double round3(double v) { return std::round(v * 1000.0) / 1000.0; }
}  // namespace

TEST_CASE("published rows are reproduced to three decimals") {
  const GofRow r = score(3961.018, 2, 2492);
  CHECK(round3(r.aic) == 7926.036);
  CHECK(round3(r.bic) == 7937.678);
  CHECK(round3(r.aicc) == 7926.041);
  CHECK(round3(r.caic) == 7939.678);

  const GofRow s = score(755.5741, 2, 628);
  CHECK(round3(s.bic) == 1524.033);
  CHECK(round3(s.caic) == 1526.033);
}

TEST_CASE("degenerate row") {
  const GofRow r = score(0.0, 0, 2);
  CHECK(r.aic == 0.0);
  CHECK(r.bic == 0.0);
  CHECK(r.aicc == 0.0);
  CHECK(r.caic == 0.0);
}

TEST_CASE("formula identities on random inputs") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> nll_dist(-500.0, 20000.0);
  for (int i = 0; i < 2000; ++i) {
    const double nll = nll_dist(gen);
    const int p = static_cast<int>(gen() % 6);
    const std::size_t n = p + 2 + gen() % 5000;
    const GofRow r = score(nll, p, n);
    const double ln_n = std::log(static_cast<double>(n));
    const double tol = 1e-9 * std::max(1.0, std::abs(r.aic));
    CHECK(std::abs(r.aic - (2 * nll + 2 * p)) <= tol);
    CHECK(std::abs(r.bic - (2 * nll + p * ln_n)) <= tol);
    CHECK(std::abs(r.caic - (2 * nll + p * (ln_n + 1))) <= tol);
    CHECK(std::abs(r.aicc - (r.aic + (2.0 * p * p + 2.0 * p) / (n - p - 1.0))) <= tol);
    CHECK(std::abs(r.caic - r.bic - p) <= tol);
  }
}

TEST_CASE("score rejects too few observations") {
  CHECK_THROWS_AS(score(1.0, 2, 3), DomainError);
  CHECK_THROWS_AS(score(1.0, 0, 1), DomainError);
  CHECK_NOTHROW(score(1.0, 2, 4));
}

TEST_CASE("score from a fit carries the model") {
  FitResult f;
  f.model = ModelId::ExpIgPareto;
  f.nll = 100.0;
  f.n = 50;
  f.p = 2;
  const GofRow r = score(f);
  CHECK(r.model == ModelId::ExpIgPareto);
  CHECK(r.label == model_label(ModelId::ExpIgPareto));
  CHECK(r.aic == 204.0);
  CHECK_FALSE(r.literature);
}

TEST_CASE("an extra parameter without likelihood gain ranks lower everywhere") {
  const GofRow small = score(500.0, 1, 300, "small");
  const GofRow big = score(500.0, 2, 300, "big");
  for (Criterion c : {Criterion::Aic, Criterion::Bic, Criterion::Aicc, Criterion::Caic}) {
    CHECK(big.value(c) > small.value(c));
    const auto t = compare({big, small}, c);
    CHECK(t.rows.front().label == "small");
  }
  const auto t = compare({big, small});
  CHECK(t.criterion == Criterion::Bic);
  CHECK(t.ranks[0][2] == 1);
  CHECK(t.ranks[1][2] == 2);
  // nll ties: input order kept
  CHECK(t.ranks[0][0] == 2);
}

TEST_CASE("criterion choice changes the order") {
  // Many observations: BIC penalizes p harder than AIC.
  const GofRow a = score(1000.0, 1, 5000, "a");
  const GofRow b = score(998.5, 2, 5000, "b");
  CHECK(compare({a, b}, Criterion::Aic).rows.front().label == "b");
  CHECK(compare({a, b}, Criterion::Bic).rows.front().label == "a");
  CHECK(compare({a, b}, Criterion::Nll).rows.front().label == "b");
  const auto single = compare({a});
  CHECK(single.rows.size() == 1);
  CHECK(single.ranks[0] == std::array<std::size_t, 5>{1, 1, 1, 1, 1});
}

TEST_CASE("criterion names") {
  for (Criterion c : kAllCriteria) CHECK(parse_criterion(criterion_name(c)) == c);
  CHECK_FALSE(parse_criterion("hqic").has_value());
}

TEST_CASE("literature rows") {
  const auto danish = literature_rows("danish");
  REQUIRE(danish.size() == 2);
  for (const auto& r : danish) {
    CHECK(r.literature);
    CHECK_FALSE(r.model.has_value());
    CHECK(r.p == 4);
    CHECK(r.n == 2492);
  }
  CHECK(literature_rows("norwegian").size() == 2);
  CHECK(literature_rows("other").empty());
}

TEST_CASE("exponentiated models beat their parents on heavy-tailed data") {
  const auto y = exp_exp_pareto(1.0, 0.6).sample(1500, 99);
  const GofRow exp2 = score(fit(ModelId::ExpExpPareto, y));
  const GofRow exp1 = score(fit(ModelId::ExpPareto1p, y));
  const GofRow ig2 = score(fit(ModelId::ExpIgPareto, y));
  const GofRow ig1 = score(fit(ModelId::IgPareto1p, y));
  for (Criterion c : kAllCriteria) {
    CHECK(exp2.value(c) < exp1.value(c));
    CHECK(ig2.value(c) < ig1.value(c));
  }
}
