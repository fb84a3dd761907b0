#pragma once

// Text output helpers. All numeric output goes through fmt17 so identical
// inputs produce byte-identical files.

#include <string>
#include <vector>

namespace spn {

// Shortest round-trippable decimal with 17 significant digits.
std::string fmt17(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Comma-separated, header row, LF line endings.
void write_csv(const CsvTable& table, const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace spn
