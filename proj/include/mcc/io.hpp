#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mcc/measures.hpp"

namespace mcc {

// 17 significant digits; parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view s);

std::filesystem::path header_path(const std::filesystem::path& csv);

// CSV columns node,value (1-D) or node1,node2,value (2-D) plus a JSON header
// next to it carrying the grid and description.
void write_density(const std::filesystem::path& csv, const GridDensity& d);
GridDensity read_density(const std::filesystem::path& csv);

void write_function(const std::filesystem::path& csv, const GridFunction& f, const std::string& value_name);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void row_text(const std::vector<std::string>& values);
  void close();
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace mcc
