#include "expcomp/gof.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "expcomp/errors.hpp"

namespace expcomp {
namespace {

GofRow published(const char* label, int p, std::size_t n, double nll, double aic, double bic,
                 double aicc, double caic) {
  GofRow row;
  row.label = label;
  row.p = p;
  row.n = n;
  row.nll = nll;
  row.aic = aic;
  row.bic = bic;
  row.aicc = aicc;
  row.caic = caic;
  row.literature = true;
  return row;
}

}  // namespace

std::string_view criterion_name(Criterion c) {
  switch (c) {
    case Criterion::Nll: return "nll";
    case Criterion::Aic: return "aic";
    case Criterion::Bic: return "bic";
    case Criterion::Aicc: return "aicc";
    case Criterion::Caic: return "caic";
  }
  return "?";
}

std::optional<Criterion> parse_criterion(std::string_view name) {
  for (Criterion c : kAllCriteria) {
    if (criterion_name(c) == name) return c;
  }
  return std::nullopt;
}

double GofRow::value(Criterion c) const {
  switch (c) {
    case Criterion::Nll: return nll;
    case Criterion::Aic: return aic;
    case Criterion::Bic: return bic;
    case Criterion::Aicc: return aicc;
    case Criterion::Caic: return caic;
  }
  return nll;
}

GofRow score(double nll, int p, std::size_t n, std::string label) {
  if (p < 0) throw DomainError("parameter count must be nonnegative");
  if (static_cast<double>(n) <= p + 1.0) {
    throw DomainError("information criteria need n > p + 1 (n=" + std::to_string(n) +
                      ", p=" + std::to_string(p) + ")");
  }
  const double nd = static_cast<double>(n);
  const double pd = static_cast<double>(p);
  const double log_n = std::log(nd);
  GofRow row;
  row.label = std::move(label);
  row.p = p;
  row.n = n;
  row.nll = nll;
  row.aic = 2.0 * nll + 2.0 * pd;
  row.bic = 2.0 * nll + pd * log_n;
  row.aicc = 2.0 * nll + 2.0 * nd * pd / (nd - pd - 1.0);
  row.caic = 2.0 * nll + pd * (log_n + 1.0);
  return row;
}

GofRow score(const FitResult& fit) {
  GofRow row = score(fit.nll, fit.p, fit.n, std::string(model_label(fit.model)));
  row.model = fit.model;
  return row;
}

RankedTable compare(std::vector<GofRow> rows, Criterion criterion) {
  const std::size_t count = rows.size();
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rows[a].value(criterion) < rows[b].value(criterion);
  });

  std::vector<std::array<std::size_t, 5>> input_ranks(count);
  for (std::size_t c = 0; c < kAllCriteria.size(); ++c) {
    std::vector<std::size_t> by(count);
    std::iota(by.begin(), by.end(), std::size_t{0});
    std::stable_sort(by.begin(), by.end(), [&](std::size_t a, std::size_t b) {
      return rows[a].value(kAllCriteria[c]) < rows[b].value(kAllCriteria[c]);
    });
    for (std::size_t r = 0; r < count; ++r) input_ranks[by[r]][c] = r + 1;
  }

  RankedTable table;
  table.criterion = criterion;
  for (std::size_t i : order) {
    table.rows.push_back(std::move(rows[i]));
    table.ranks.push_back(input_ranks[i]);
  }
  return table;
}

std::span<const GofRow> literature_rows(std::string_view dataset) {
  static const std::vector<GofRow> danish{
      published("Weibull-Inverse Weibull (literature)", 4, 2492, 3820.0, 7648.0, 7671.3, 7648.0,
                7675.3),
      published("Weibull-Pareto (literature)", 4, 2492, 3823.7, 7655.4, 7678.6, 7655.4, 7682.5),
  };
  static const std::vector<GofRow> norwegian{
      published("Weibull-Inverse Weibull (literature)", 4, 628, 750.9702, 1509.940, 1527.711,
                1510.005, 1531.711),
      published("Weibull-Pareto (literature)", 4, 628, 1077.078, 2162.156, 2179.926, 2162.220,
                2183.926),
  };
  if (dataset == "danish") return danish;
  if (dataset == "norwegian") return norwegian;
  return {};
}

}  // namespace expcomp
