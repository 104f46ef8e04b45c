#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cambrian {

// Raised when a caller breaks a documented precondition.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, const std::string& what)
        : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row), detail_(what) {}

    std::size_t row() const noexcept { return row_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t row_;
    std::string detail_;
};

class DatasetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool condition, const char* message)
{
    if (!condition) {
        throw ContractError(message);
    }
}
} // namespace detail

} // namespace cambrian
