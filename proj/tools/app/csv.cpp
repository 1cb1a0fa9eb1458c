#include "app/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rinorm::app {

void CsvTable::add(std::vector<Cell> row) {
  if (row.size() != header_.size())
    throw std::invalid_argument("csv row has " + std::to_string(row.size()) + " cells, header has " +
                                std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

std::string CsvTable::format(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) {
    if (s->find_first_of(",\"\n") == std::string::npos) return *s;
    std::string q = "\"";
    for (char ch : *s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  const double v = std::get<double>(c);
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

void CsvTable::write(std::ostream& os) const {
  for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format(row[i]);
    os << '\n';
  }
}

void CsvTable::write(const std::filesystem::path& file) const {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  write(os);
  if (!os) throw std::runtime_error("error while writing " + file.string());
}

}  // namespace rinorm::app
