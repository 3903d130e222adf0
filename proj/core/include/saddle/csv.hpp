#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace saddle {

/// Shortest decimal string that round-trips to the same double (at most 17
/// significant digits). "nan", "inf", "-inf" for non-finite values.
[[nodiscard]] std::string format_double(double v);

/// Minimal CSV writer; numeric cells go through format_double, strings are
/// quoted when they contain a separator, quote or newline.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& columns);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  void separator();
  std::ostream& out_;
  bool row_started_ = false;
};

/// Opens `path` for writing (creating parent directories); throws
/// saddle::Error with the path in the message on failure.
void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

}  // namespace saddle
