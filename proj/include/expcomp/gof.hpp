#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expcomp/estimation.hpp"

namespace expcomp {

enum class Criterion { Nll, Aic, Bic, Aicc, Caic };

inline constexpr std::array<Criterion, 5> kAllCriteria{Criterion::Nll, Criterion::Aic, Criterion::Bic,
                                                       Criterion::Aicc, Criterion::Caic};

std::string_view criterion_name(Criterion c);
std::optional<Criterion> parse_criterion(std::string_view name);

struct GofRow {
  std::string label;
  /// Empty for literature rows, which are displayed but never computed.
  std::optional<ModelId> model;
  int p = 0;
  std::size_t n = 0;
  double nll = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double aicc = 0.0;
  double caic = 0.0;
  bool literature = false;

  double value(Criterion c) const;
};

/// aic = 2nll + 2p, bic = 2nll + p ln n, aicc = 2nll + 2np/(n-p-1),
/// caic = 2nll + p(ln n + 1). Rejects n <= p + 1 with DomainError.
GofRow score(double nll, int p, std::size_t n, std::string label = {});
GofRow score(const FitResult& fit);

struct RankedTable {
  Criterion criterion = Criterion::Bic;
  /// Sorted ascending by `criterion`; ties keep input order.
  std::vector<GofRow> rows;
  /// ranks[i][c] is the 1-based rank of rows[i] under kAllCriteria[c].
  std::vector<std::array<std::size_t, 5>> ranks;
};

RankedTable compare(std::vector<GofRow> rows, Criterion criterion = Criterion::Bic);

/// Published rows for four-parameter mixing-weight composites on the two
/// reference insurance datasets ("danish", "norwegian"). Empty span for other names.
std::span<const GofRow> literature_rows(std::string_view dataset);

}  // namespace expcomp
