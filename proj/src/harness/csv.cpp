#include "thermreg/harness/csv.hpp"

#include "thermreg/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace thermreg::harness {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::manifest(const std::string& key, const std::string& value) { manifest_.emplace_back(key, value); }

void CsvTable::add_row(std::vector<std::string> fields) {
  if (fields.size() != columns_.size()) throw InvalidArgument("csv: row width does not match the header");
  rows_.push_back(std::move(fields));
}

void CsvTable::write(std::ostream& out) const {
  for (const auto& [k, v] : manifest_) out << "# " << k << ": " << v << "\n";
  auto line = [&](const std::vector<std::string>& f) {
    for (std::size_t i = 0; i < f.size(); ++i) out << (i ? "," : "") << quote_field(f[i]);
    out << "\n";
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
}

void CsvTable::write_file(const std::string& path) const {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open output file " + path);
  write(out);
  if (!out) throw Error("write failed: " + path);
}

}  // namespace thermreg::harness
