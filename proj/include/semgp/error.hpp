#pragma once

#include <stdexcept>
#include <string>

namespace semgp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input error carrying a file location (1-based row, 1-based column).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t row, std::size_t column)
        : Error(msg + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
          row_(row), column_(column) {}

    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

} // namespace semgp
