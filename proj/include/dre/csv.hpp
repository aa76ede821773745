#ifndef DRE_CSV_HPP
#define DRE_CSV_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dre {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal representation ('.' decimal point, no locale).
std::string format_double(double v);
double parse_double(std::string_view s);

/// RFC-4180 writer with a fixed header.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);

  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(std::int64_t v);
  CsvWriter& operator<<(std::uint64_t v);
  CsvWriter& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
  CsvWriter& operator<<(std::string_view v);
  /// Terminates the row; throws if the field count does not match the header.
  void end_row();

 private:
  void field(std::string_view text);

  std::ostream& os_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

/// Whole-file CSV table of strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  std::vector<double> numeric_column(std::string_view name) const;
};

/// Parses one RFC-4180 record; returns false at end of input.
bool read_csv_record(std::istream& is, std::vector<std::string>& out);

CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

}  // namespace dre

#endif  // DRE_CSV_HPP
