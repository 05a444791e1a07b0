// Minimal CSV I/O. Numbers are written in shortest round-trip decimal form.

#ifndef PICLAB_CSV_HPP
#define PICLAB_CSV_HPP

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace piclab {

/// Shortest decimal text that parses back to exactly `value`; "nan" for NaN.
std::string format_double(double value);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& operator<<(double value);
  CsvWriter& operator<<(long long value);
  CsvWriter& operator<<(int value) { return *this << static_cast<long long>(value); }
  CsvWriter& operator<<(std::string_view text);
  void end_row();

 private:
  void separator();

  std::ofstream out_;
  bool row_started_ = false;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Parses a full-precision decimal written by format_double.
double parse_double(std::string_view text);

}  // namespace piclab

#endif  // PICLAB_CSV_HPP
