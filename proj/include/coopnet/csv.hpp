#pragma once
// Minimal strict CSV layer for the fixed survey/artifact schemas: exact header
// match, comma-separated, no quoting (fields containing quotes are rejected).

#include <string>
#include <vector>

namespace coopnet::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each row has header.size() fields
};

// Throws io errors naming the file and validation errors naming the line.
Table read_file(const std::string& path, const std::vector<std::string>& expected_header);

// Parses already-loaded text (used by tests and by read_file).
Table parse(const std::string& text, const std::vector<std::string>& expected_header,
            const std::string& origin);

// Shortest representation that round-trips a double exactly.
std::string format_double(double x);

std::string join_row(const std::vector<std::string>& fields);

}  // namespace coopnet::csv
