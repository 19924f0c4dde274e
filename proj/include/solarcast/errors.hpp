#pragma once

#include <stdexcept>
#include <string>

namespace solarcast {

/// Invalid argument values (out-of-range day, bad AR parameters, ...).
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A malformed row or token in an input file; carries the line number in the message.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Structural violations: duplicate or non-monotone timestamps, cadence mismatch.
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class TrainingError : public std::runtime_error {
public:
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

/// Model file problems: unsupported version, checksum failure, truncation.
class ModelFormatError : public std::runtime_error {
public:
    explicit ModelFormatError(const std::string& what) : std::runtime_error(what) {}
};

class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace solarcast
