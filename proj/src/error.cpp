#include "scatter_sense/error.hpp"

namespace scatter_sense {

namespace {

std::string with_location(const std::string& what, std::size_t row, std::size_t column)
{
    if (row == 0) return what;
    std::string loc = " (row " + std::to_string(row);
    if (column != 0) loc += ", column " + std::to_string(column);
    return what + loc + ")";
}

}  // namespace

SchemaError::SchemaError(const std::string& what, std::size_t row, std::size_t column)
    : Error(with_location(what, row, column)), row_(row), column_(column)
{
}

}  // namespace scatter_sense
