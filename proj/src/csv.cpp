#include "tmyag/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tmyag/error.hpp"

namespace tmyag::csv {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

Writer::Writer(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ += ',';
    out_ += quote(header[i]);
  }
  out_ += '\n';
}

void Writer::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) {
    throw InvalidDataset("CSV row has " + std::to_string(cells.size()) + " fields, header has " +
                         std::to_string(columns_));
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    if (const auto* d = std::get_if<double>(&cells[i])) {
      out_ += format_number(*d);
    } else {
      out_ += quote(std::get<std::string>(cells[i]));
    }
  }
  out_ += '\n';
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw MissingField("CSV column '" + std::string(name) + "' not found");
}

double Table::number(std::size_t row, std::size_t col) const {
  const std::string& s = rows.at(row).at(col);
  double v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  if (first < last && *first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParseError("not a number: '" + s + "'", lines.at(row));
  }
  return v;
}

Table parse(std::string_view text) {
  Table t;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_record = [&] {
    if (!field_started && record.empty() && field.empty()) return;  // blank line
    record.push_back(std::move(field));
    field.clear();
    if (t.header.empty()) {
      t.header = std::move(record);
    } else {
      if (record.size() != t.header.size()) {
        throw ParseError("expected " + std::to_string(t.header.size()) + " fields, got " +
                             std::to_string(record.size()),
                         record_line);
      }
      t.rows.push_back(std::move(record));
      t.lines.push_back(record_line);
    }
    record.clear();
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", line);
  end_record();
  if (t.header.empty()) throw ParseError("empty CSV document", 1);
  return t;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace tmyag::csv
