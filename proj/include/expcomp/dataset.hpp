#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "expcomp/errors.hpp"

namespace expcomp {

/// A value that parsed but is zero, negative or not finite after scaling.
class NonPositiveValueError : public ParseError {
 public:
  using ParseError::ParseError;
};

struct ClaimsDataset {
  std::vector<double> values;
  std::string name;
  std::string scale_note;

  std::vector<double> sorted() const;
};

/// Column by 0-based index or by header name.
using ColumnRef = std::variant<std::size_t, std::string>;

/// Digits only -> index, anything else -> name.
ColumnRef parse_column_ref(std::string_view text);

/// Reads one numeric column from a comma-separated file. A header row is
/// required when the column is named and detected otherwise (first row whose
/// field is not numeric). Values are multiplied by `scale`. Row numbers in
/// errors are 1-based file lines. Blank lines are skipped.
ClaimsDataset ingest_csv(const std::filesystem::path& path, const ColumnRef& column = std::size_t{0},
                         double scale = 1.0);

/// Same, from in-memory text.
ClaimsDataset parse_csv(std::string_view text, const ColumnRef& column = std::size_t{0},
                        double scale = 1.0, std::string name = "inline");

}  // namespace expcomp
