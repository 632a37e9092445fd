#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace frameflow {

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

/// Comma-separated rows; numeric cells use format_double.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void header(const std::vector<std::string>& columns);
  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  CsvWriter& cell(std::string_view text);
  void end_row();

 private:
  void separator();
  std::ostream& out_;
  bool row_started_ = false;
};

}  // namespace frameflow
