#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace cvfp {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

/// Minimal CSV emitter: header row first, fixed column order, no quoting
/// (cells never contain separators).
class CsvWriter {
  public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header);

    CsvWriter& cell(double v);
    CsvWriter& cell(std::int64_t v);
    CsvWriter& cell(std::size_t v);
    CsvWriter& cell(int v) { return cell(static_cast<std::int64_t>(v)); }
    CsvWriter& cell(const std::string& v);
    /// Terminates the current row; throws if the column count is wrong.
    void end_row();

  private:
    void sep();
    std::ostream& os_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

}  // namespace cvfp
