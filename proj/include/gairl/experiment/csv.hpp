#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gairl::experiment {

/// Shortest round-trip decimal form, '.' separator.
std::string format_number(double v);
std::string format_optional(const std::optional<double>& v);

/// Comma-separated table with a header row. Fields never contain commas or
/// quotes, so no quoting is applied.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> find(const std::string& column) const;
  /// Throws std::runtime_error naming the column and file when absent.
  std::size_t column(const std::string& name) const;
  std::string source;
};

CsvTable read_csv(const std::string& path);

}  // namespace gairl::experiment
