#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace portalens {

/// Bad caller input: malformed files, out-of-range arguments, rejected
/// events. The CLI maps these to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input error tied to a line of a text file.
class ParseError : public InputError {
public:
    ParseError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace portalens
