#pragma once

#include <stdexcept>
#include <string>

namespace wlab {

// Error kinds surfaced by the library. The CLI maps every one of these to
// exit code 2 (validation) except IoError, which maps to 4.

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class SizingError : public std::length_error {
public:
    using std::length_error::length_error;
};

class PrecisionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class InsufficientDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace wlab
