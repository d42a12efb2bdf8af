#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phaseportrait::csv {

struct Table {
  std::vector<std::string> header;
  /// rows[i] has header.size() cells; row_numbers[i] is the 1-based line in
  /// the source file.
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_numbers;

  std::optional<std::size_t> column(std::string_view name) const;
};

Table parse(std::string_view text, const std::string& source = "<memory>");
Table read_file(const std::filesystem::path& path);

/// Strict decimal parse with '.' radix; whole cell must be consumed.
std::optional<double> parse_double(std::string_view cell);
std::optional<long> parse_integer(std::string_view cell);

/// Shortest representation that round-trips, locale independent.
std::string format_double(double value);

}  // namespace phaseportrait::csv
