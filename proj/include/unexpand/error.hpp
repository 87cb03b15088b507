#pragma once

#include <stdexcept>
#include <string>

namespace unexpand {

/// Base of every error raised by the library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Arithmetic and builtin errors, mirroring the ISO error classes.
class instantiation_error : public error {
public:
    using error::error;
};

class type_error : public error {
public:
    using error::error;
};

class evaluation_error : public error {
public:
    using error::error;
};

class existence_error : public error {
public:
    using error::error;
};

class resource_error : public error {
public:
    using error::error;
};

}  // namespace unexpand
