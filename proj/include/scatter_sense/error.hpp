#pragma once

#include <stdexcept>
#include <string>

namespace scatter_sense {

// Base for every domain error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the operation's domain (non-positive frequency, angle out of range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Named entity (material, database row) that does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

// Malformed input file. Carries 1-based row/column when known (0 = not applicable).
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::size_t row = 0, std::size_t column = 0);

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

}  // namespace scatter_sense
