#pragma once

#include <stdexcept>
#include <string>

namespace uqkit {

// Bad caller input: out-of-range values, mismatched lengths, single-class
// data where both classes are required, malformed config.
class input_error : public std::invalid_argument {
public:
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

// Filesystem trouble (missing file, unwritable path).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file content; message carries row/column diagnostics.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace uqkit
