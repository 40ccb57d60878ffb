#pragma once

#include <string>
#include <vector>

namespace smooco {

// Shortest decimal that round-trips the exact double (std::to_chars).
std::string format_double(double v);

// Strict parse of a full token; throws ParameterError on trailing garbage.
double parse_double(const std::string& token);
std::int64_t parse_int(const std::string& token);

std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& lines);

}  // namespace smooco
