#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace semweave {

// Syntax error in a Turtle document or a query pattern. Line/column are
// 1-based; (0,0) means the position is not applicable.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line = 0, std::size_t col = 0)
        : std::runtime_error(format(message, line, col)), line_(line), col_(col) {}

    std::size_t line() const { return line_; }
    std::size_t col() const { return col_; }

private:
    static std::string format(const std::string& message, std::size_t line, std::size_t col) {
        if (line == 0) return message;
        return message + " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")";
    }

    std::size_t line_;
    std::size_t col_;
};

// Structural problem in a service annotation file.
class AnnotationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A requested triple is not in the store and not type-inferable.
class ExtractError : public std::runtime_error {
public:
    explicit ExtractError(const std::string& missing_triple)
        : std::runtime_error("missing triple: " + missing_triple), missing_(missing_triple) {}

    const std::string& missing_triple() const { return missing_; }

private:
    std::string missing_;
};

// Service invocation failure: unresolvable endpoint, timeout, transport
// error, non-success status, or malformed response body.
class ConnectorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Response could not be lifted into the output model.
class LiftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace semweave
