#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bvg::harness {

/// Column-oriented CSV builder; doubles are printed with 17 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(bool v);
  void end_row();

  const std::string& str() const { return out_; }

 private:
  void sep();
  std::size_t columns_;
  std::size_t filled_ = 0;
  std::string out_;
};

/// "%.17g", with nan and inf spelled "nan", "inf", "-inf".
std::string format_double(double v);

/// Writes via a temporary file in the same directory and renames it into
/// place. Throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Creates the directory (and parents). Throws IoError.
void ensure_directory(const std::filesystem::path& dir);

/// UTC timestamp, ISO 8601.
std::string utc_timestamp();

}  // namespace bvg::harness
