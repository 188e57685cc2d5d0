#pragma once

#include <stdexcept>
#include <string>

namespace lexikit {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration. The CLI maps this to exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

// An image that was expected to contain ink had no pixel above threshold.
struct EmptyGlyphError : Error {
    using Error::Error;
};

// A letter could not be placed on the canvas after the retry budget.
struct PlacementError : Error {
    using Error::Error;
};

// Malformed label/prediction/manifest content.
struct ParseError : Error {
    ParseError(const std::string& file, int line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what),
          file_path(file),
          line_number(line) {}
    explicit ParseError(const std::string& what) : Error(what), line_number(0) {}

    std::string file_path;
    int line_number;
};

// Filesystem-level failure (unreadable file, unwritable directory).
struct IoError : Error {
    using Error::Error;
};

}  // namespace lexikit
