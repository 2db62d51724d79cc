#pragma once

#include <stdexcept>
#include <string>

namespace pqs {

// Error taxonomy mirrored by the CLI exit codes: configuration/validation
// problems (1), I/O and parsing problems (2), numerical failures (3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Parse failure in a text input; carries the 1-based line number.
class ParseError : public IoError {
public:
    ParseError(const std::string& origin, long line, const std::string& what)
        : IoError(origin + ":" + std::to_string(line) + ": " + what), line_(line) {}

    long line() const { return line_; }

private:
    long line_;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace pqs
