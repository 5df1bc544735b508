#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fairtransport {

/// RFC-4180 table: a required header row plus zero or more data rows, every
/// row with the same arity as the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Strict RFC-4180 parse: quoted fields with "" escapes, LF or CRLF record
/// separators, no bare quotes inside unquoted fields. Throws ParseError.
CsvTable parse_csv(std::string_view text);

CsvTable read_csv_file(const std::filesystem::path& path);

/// Serializes with minimal quoting (quotes only when a field contains
/// comma, quote, CR, or LF), LF line endings, trailing LF after every row.
std::string write_csv(const CsvTable& table);

}  // namespace fairtransport
