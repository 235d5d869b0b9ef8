#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "freezing/markov_core.hpp"

namespace freezing {

/// Shortest round-trip decimal form with '.' separator, independent of the
/// global locale.
std::string format_double(double v);

/// Minimal CSV emitter: comma separated, LF line endings, no quoting (fields
/// are numbers or plain identifiers).
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& names);
  CsvWriter& field(double v);
  CsvWriter& field(std::int64_t v);
  CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
  CsvWriter& field(std::uint64_t v);
  CsvWriter& field(std::string_view v);
  CsvWriter& fields(const Vector& v);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool fresh_row_ = true;
};

/// Names prefix_1 .. prefix_d.
std::vector<std::string> numbered(std::string_view prefix, int d);

/// Writes a matrix as CSV with the given header (may be empty).
void write_matrix(std::ostream& out, const Matrix& m, const std::vector<std::string>& header = {});

}  // namespace freezing
