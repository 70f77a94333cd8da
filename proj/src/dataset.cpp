#include "expcomp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

namespace expcomp {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"'");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"'");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> to_number(std::string_view field) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) return std::nullopt;
  return value;
}

std::string format_scale(double scale) {
  std::ostringstream os;
  os << "values multiplied by " << scale;
  return os.str();
}

}  // namespace

std::vector<double> ClaimsDataset::sorted() const {
  std::vector<double> out = values;
  std::sort(out.begin(), out.end());
  return out;
}

ColumnRef parse_column_ref(std::string_view text) {
  if (!text.empty() && std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    std::size_t index = 0;
    std::from_chars(text.data(), text.data() + text.size(), index);
    return index;
  }
  return std::string(text);
}

ClaimsDataset parse_csv(std::string_view text, const ColumnRef& column, double scale,
                        std::string name) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ParseError("scale must be positive", 0);

  ClaimsDataset data;
  data.name = std::move(name);
  data.scale_note = format_scale(scale);

  const auto* named = std::get_if<std::string>(&column);
  std::optional<std::size_t> index;
  if (const auto* i = std::get_if<std::size_t>(&column)) index = *i;
  bool seen_first = false;

  std::size_t row = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    const auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++row;
    if (trim(line).empty()) continue;

    const auto fields = split(line);
    if (!seen_first) {
      seen_first = true;
      if (named) {
        const auto it = std::find(fields.begin(), fields.end(), std::string_view(*named));
        if (it == fields.end()) throw ParseError("column '" + *named + "' not found in header", row);
        index = static_cast<std::size_t>(it - fields.begin());
        continue;
      }
      if (*index < fields.size() && !to_number(fields[*index])) continue;  // header row
    }
    if (*index >= fields.size()) {
      throw ParseError("row has no column " + std::to_string(*index), row);
    }
    const auto value = to_number(fields[*index]);
    if (!value) {
      throw ParseError("not a number: '" + std::string(fields[*index]) + "'", row);
    }
    const double scaled = *value * scale;
    if (!(scaled > 0.0) || !std::isfinite(scaled)) {
      throw NonPositiveValueError("value must be strictly positive: '" +
                                      std::string(fields[*index]) + "'",
                                  row);
    }
    data.values.push_back(scaled);
  }
  if (data.values.empty()) throw ParseError("no data rows", row);
  return data;
}

ClaimsDataset ingest_csv(const std::filesystem::path& path, const ColumnRef& column, double scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), column, scale, path.stem().string());
}

}  // namespace expcomp
