#include "dre/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace dre {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw CsvError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header)
    : os_(os), columns_(header.size()) {
  for (const auto& h : header) field(h);
  end_row();
}

void CsvWriter::field(std::string_view text) {
  if (filled_ > 0) os_ << ',';
  const bool quote = text.find_first_of(",\"\r\n") != std::string_view::npos;
  if (quote) {
    os_ << '"';
    for (char c : text) {
      if (c == '"') os_ << '"';
      os_ << c;
    }
    os_ << '"';
  } else {
    os_ << text;
  }
  ++filled_;
}

CsvWriter& CsvWriter::operator<<(double v) {
  field(format_double(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::int64_t v) {
  field(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::uint64_t v) {
  field(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view v) {
  field(v);
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) {
    throw CsvError("row has " + std::to_string(filled_) + " fields, header has " +
                   std::to_string(columns_));
  }
  os_ << "\r\n";
  filled_ = 0;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw CsvError("no column named '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(parse_double(r.at(c)));
  return out;
}

bool read_csv_record(std::istream& is, std::vector<std::string>& out) {
  out.clear();
  if (is.peek() == std::char_traits<char>::eof()) return false;
  std::string cur;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (is.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (is.peek() == '"') {
          is.get(c);
          cur += '"';
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\r') {
      if (is.peek() == '\n') is.get(c);
      break;
    } else if (c == '\n') {
      break;
    } else {
      cur += c;
    }
  }
  if (in_quotes) throw CsvError("unterminated quoted field");
  if (!any) return false;
  out.push_back(std::move(cur));
  return true;
}

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  if (!read_csv_record(is, t.header)) throw CsvError("empty CSV input");
  std::vector<std::string> rec;
  while (read_csv_record(is, rec)) {
    if (rec.size() == 1 && rec[0].empty()) continue;
    if (rec.size() != t.header.size()) {
      throw CsvError("schema mismatch: row " + std::to_string(t.rows.size() + 1) + " has " +
                     std::to_string(rec.size()) + " fields, header has " +
                     std::to_string(t.header.size()));
    }
    t.rows.push_back(rec);
  }
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open " + path);
  return read_csv(in);
}

}  // namespace dre
