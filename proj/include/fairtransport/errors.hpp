#pragma once

#include <stdexcept>
#include <string>

namespace fairtransport {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Input text could not be parsed. Carries 1-based line/column of the offending token.
struct ParseError : Error {
    ParseError(const std::string& what, int line_, int col_)
        : Error("line " + std::to_string(line_) + ", col " + std::to_string(col_) + ": " + what),
          line(line_), col(col_) {}
    int line = 0;
    int col = 0;
};

// Well-formed input that violates a contract (undeclared name, shape mismatch, ...).
struct ValidationError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace fairtransport
