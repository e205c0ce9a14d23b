#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nftledger {

struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0;  // 1-based physical line where the row starts
};

/// Minimal RFC 4180 reader: comma separated, double-quote quoting with ""
/// escapes, quoted fields may span lines. CRLF and LF both accepted.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    /// Next row, or nullopt at end of input. Blank lines are skipped.
    std::optional<CsvRow> next();

private:
    std::istream& in_;
    std::size_t line_ = 0;
};

/// Quotes the field if it contains a comma, quote, or newline.
std::string csv_escape(std::string_view field);

void write_csv_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace nftledger
