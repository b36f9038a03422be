#pragma once

#include <stdexcept>
#include <string>

namespace catex {

/// Contract violations: bad arguments, out-of-range values, dimension mismatches.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntactically or structurally invalid file contents.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace catex
