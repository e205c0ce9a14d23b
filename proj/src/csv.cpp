#include "nftledger/csv.hpp"

namespace nftledger {

std::optional<CsvRow> CsvReader::next() {
    int c = in_.get();
    while (c == '\n' || c == '\r') {  // skip blank lines
        if (c == '\n') ++line_;
        c = in_.get();
    }
    if (c == EOF) return std::nullopt;

    CsvRow row;
    row.line = line_ + 1;
    std::string field;
    bool quoted = false;
    while (true) {
        if (quoted) {
            if (c == EOF) break;  // unterminated quote: keep what we have
            if (c == '"') {
                int peek = in_.get();
                if (peek == '"') {
                    field.push_back('"');
                } else {
                    quoted = false;
                    in_.unget();
                }
            } else {
                if (c == '\n') ++line_;
                field.push_back(static_cast<char>(c));
            }
        } else {
            if (c == EOF || c == '\n') {
                if (c == '\n') ++line_;
                break;
            }
            if (c == '\r') {
                // swallow, handle \r\n
            } else if (c == '"' && field.empty()) {
                quoted = true;
            } else if (c == ',') {
                row.fields.push_back(std::move(field));
                field.clear();
            } else {
                field.push_back(static_cast<char>(c));
            }
        }
        c = in_.get();
    }
    row.fields.push_back(std::move(field));
    return row;
}

std::string csv_escape(std::string_view field) {
    bool needs_quote = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quote) return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char ch : field) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.put(',');
        out << csv_escape(fields[i]);
    }
    out.put('\n');
}

}  // namespace nftledger
