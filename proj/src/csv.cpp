#include "freezing/csv.hpp"

#include <charconv>
#include <cmath>

namespace freezing {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvWriter::separator() {
  if (!fresh_row_) out_.put(',');
  fresh_row_ = false;
}

void CsvWriter::header(const std::vector<std::string>& names) {
  for (const auto& n : names) field(std::string_view(n));
  end_row();
}

CsvWriter& CsvWriter::field(double v) {
  separator();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::field(std::int64_t v) {
  separator();
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out_.write(buf, res.ptr - buf);
  return *this;
}

CsvWriter& CsvWriter::field(std::uint64_t v) {
  separator();
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out_.write(buf, res.ptr - buf);
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::fields(const Vector& v) {
  for (Eigen::Index k = 0; k < v.size(); ++k) field(v(k));
  return *this;
}

void CsvWriter::end_row() {
  out_.put('\n');
  fresh_row_ = true;
}

std::vector<std::string> numbered(std::string_view prefix, int d) {
  std::vector<std::string> out;
  for (int k = 1; k <= d; ++k) out.push_back(std::string(prefix) + "_" + std::to_string(k));
  return out;
}

void write_matrix(std::ostream& out, const Matrix& m, const std::vector<std::string>& header) {
  CsvWriter w(out);
  if (!header.empty()) w.header(header);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    w.fields(m.row(r).transpose());
    w.end_row();
  }
}

}  // namespace freezing
