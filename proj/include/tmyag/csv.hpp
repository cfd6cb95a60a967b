#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tmyag::csv {

/// Shortest representation that round-trips to the same double.
std::string format_number(double v);

using Cell = std::variant<double, std::string>;

/// RFC-4180 style writer: header first, fields quoted only when needed.
class Writer {
 public:
  explicit Writer(std::vector<std::string> header);

  void row(const std::vector<Cell>& cells);
  const std::string& str() const { return out_; }

 private:
  std::size_t columns_;
  std::string out_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// Line number of each row in the source, for error messages.
  std::vector<std::size_t> lines;

  /// Throws MissingField if absent.
  std::size_t column(std::string_view name) const;
  /// Throws ParseError with the source line on malformed numbers.
  double number(std::size_t row, std::size_t col) const;
};

Table parse(std::string_view text);
Table read_file(const std::filesystem::path& path);

}  // namespace tmyag::csv
