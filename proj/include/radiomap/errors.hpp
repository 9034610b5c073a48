#pragma once

#include <stdexcept>
#include <string>

namespace radiomap {

// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or truncated input; the message names the byte offset at which
// parsing stopped.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : Error(what + " (at byte " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return offset_; }

private:
    std::size_t offset_ = 0;
};

// A precondition or parameter invariant was violated by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Filesystem-level failure (unreadable / unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace radiomap
