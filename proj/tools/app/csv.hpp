#pragma once

// Plot-ready CSV: fixed column order, 12 significant digits, header always
// written.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace rinorm::app {

using Cell = std::variant<std::string, double, std::int64_t>;

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<Cell> row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

  void write(std::ostream& os) const;
  /// Throws std::runtime_error when the file cannot be written.
  void write(const std::filesystem::path& file) const;

  static std::string format(const Cell& c);

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

}  // namespace rinorm::app
