#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace thermreg::harness {

/// Scientific notation with 17 significant digits; "inf", "-inf" and "nan" spelled out.
std::string format_double(double v);

/// RFC 4180 quoting when the field contains a comma, quote or newline.
std::string quote_field(const std::string& s);

/// CSV table preceded by '#' manifest lines. Rows are written in insertion order.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void manifest(const std::string& key, const std::string& value);
  void add_row(std::vector<std::string> fields);
  std::size_t rows() const { return rows_.size(); }

  void write(std::ostream& out) const;
  /// Writes to `path`, or to standard output when path is empty or "-".
  void write_file(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> manifest_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace thermreg::harness
