#pragma once

#include <stdexcept>
#include <string>

namespace rfsim {

// Bad user-supplied configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable or inconsistent data files (CLI exit code 3).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parse failure in a text format; carries the offending line.
struct ParseError : DataError {
    ParseError(const std::string& path, std::size_t line, const std::string& msg)
        : DataError(path + ":" + std::to_string(line) + ": " + msg),
          path(path),
          line(line) {}
    std::string path;
    std::size_t line;
};

// Mathematically invalid input or a numeric failure (CLI exit code 4).
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rfsim
