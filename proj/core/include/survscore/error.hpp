#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace survscore {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
    empty_input,
    bad_header,
    malformed_row,
    bad_time,
    nonpositive_time,
    bad_arm,
    bad_event,
};

/// Raised by the CSV reader. `line()` is 1-based and counts the header.
class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), kind_(kind), line_(line) {}

    ParseErrorKind kind() const noexcept { return kind_; }
    std::size_t line() const noexcept { return line_; }

private:
    ParseErrorKind kind_;
    std::size_t line_;
};

}  // namespace survscore
