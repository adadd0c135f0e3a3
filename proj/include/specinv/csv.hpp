#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace specinv {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column, or -1.
  int column(const std::string& name) const;
};

/// 15 significant digits, '.' decimal separator.
std::string format_number(double x);

/// Writes through a temporary file in the same directory and renames it over
/// `path`, so readers never observe a partial file. Lines end in LF.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace specinv
