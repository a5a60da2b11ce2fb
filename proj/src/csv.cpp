#include "coopnet/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace coopnet::csv {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace

Table parse(const std::string& text, const std::vector<std::string>& expected_header,
            const std::string& origin) {
  Table table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument(origin + ": empty file, expected a header row");
  line = strip_cr(line);
  table.header = split_fields(line);
  if (table.header != expected_header) {
    std::string want;
    for (size_t i = 0; i < expected_header.size(); ++i)
      want += (i ? "," : "") + expected_header[i];
    throw std::invalid_argument(origin + ": bad header, expected `" + want + "`, got `" + line + "`");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    if (line.find('"') != std::string::npos)
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                  ": quoted fields are not supported");
    auto fields = split_fields(line);
    if (fields.size() != expected_header.size())
      throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(expected_header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
    table.rows.push_back(std::move(fields));
  }
  return table;
}

Table read_file(const std::string& path, const std::vector<std::string>& expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), expected_header, path);
}

std::string format_double(double x) {
  char buf[40];
  // try successively longer precisions until the value round-trips
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  return buf;
}

std::string join_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
  return out;
}

}  // namespace coopnet::csv
