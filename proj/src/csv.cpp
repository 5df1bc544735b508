#include "fairtransport/csv.hpp"

#include "fairtransport/errors.hpp"
#include "fairtransport/sha256.hpp"

namespace fairtransport {

namespace {

bool needs_quoting(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    int line = 1;
    int col = 1;
    int field_start_col = 1;

    const auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        field_start_col = col;
    };
    const auto end_record = [&] {
        end_field();
        if (table.header.empty() && table.rows.empty()) {
            table.header = std::move(record);
        } else {
            if (record.size() != table.header.size()) {
                throw ParseError("row has " + std::to_string(record.size()) + " fields, header has " +
                                     std::to_string(table.header.size()),
                                 line, 1);
            }
            table.rows.push_back(std::move(record));
        }
        record.clear();
    };

    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    i += 2;
                    col += 2;
                } else {
                    in_quotes = false;
                    ++i;
                    ++col;
                }
            } else {
                field.push_back(c);
                if (c == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
                ++i;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || field_was_quoted) {
                    throw ParseError("unexpected quote inside unquoted field", line, col);
                }
                in_quotes = true;
                field_was_quoted = true;
                ++i;
                ++col;
                break;
            case ',':
                end_field();
                ++i;
                ++col;
                break;
            case '\r':
                if (i + 1 >= text.size() || text[i + 1] != '\n') {
                    throw ParseError("bare carriage return", line, col);
                }
                end_record();
                i += 2;
                ++line;
                col = 1;
                break;
            case '\n':
                end_record();
                ++i;
                ++line;
                col = 1;
                break;
            default:
                field.push_back(c);
                ++i;
                ++col;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field starting", line, field_start_col);
    if (!field.empty() || !record.empty() || field_was_quoted) {
        end_record();  // final record without trailing newline
    }
    if (table.header.empty()) throw ParseError("empty CSV: header row required", 1, 1);
    return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    return parse_csv(read_file_bytes(path));
}

std::string write_csv(const CsvTable& table) {
    std::string out;
    const auto emit_row = [&](const std::vector<std::string>& row) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j > 0) out.push_back(',');
            if (needs_quoting(row[j])) {
                out.push_back('"');
                for (char c : row[j]) {
                    if (c == '"') out.push_back('"');
                    out.push_back(c);
                }
                out.push_back('"');
            } else {
                out += row[j];
            }
        }
        out.push_back('\n');
    };
    emit_row(table.header);
    for (const auto& row : table.rows) emit_row(row);
    return out;
}

}  // namespace fairtransport
