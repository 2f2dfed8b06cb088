#pragma once

#include <stdexcept>
#include <string>

namespace discotex {

/// Invalid input or configuration (CLI exit code 1).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// Non-finite state, singular solve or degenerate recurrence (CLI exit code 2).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be read or written (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace discotex
