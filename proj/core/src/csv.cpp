#include "cvfp/csv.hpp"

#include <cstdio>

#include "cvfp/error.hpp"

namespace cvfp {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& os, const std::vector<std::string>& header)
    : os_(os), columns_(header.size()) {
    require(!header.empty(), ErrorKind::InvalidArgument, "CSV header is empty");
    for (const auto& h : header) cell(h);
    end_row();
}

void CsvWriter::sep() {
    if (filled_ > 0) os_ << ',';
    ++filled_;
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    os_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t v) {
    sep();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(std::size_t v) {
    sep();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
    sep();
    os_ << v;
    return *this;
}

void CsvWriter::end_row() {
    require(filled_ == columns_, ErrorKind::InvalidArgument,
            "CSV row has " + std::to_string(filled_) + " cells, expected " +
                std::to_string(columns_));
    os_ << '\n';
    filled_ = 0;
}

}  // namespace cvfp
