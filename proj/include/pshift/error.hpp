#pragma once

#include <stdexcept>
#include <string>

namespace pshift {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition on a numeric argument was violated (dimension mismatch,
/// singular matrix, out-of-range index, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A configuration document is malformed. `path()` names the offending key
/// as a JSON-pointer-like string, e.g. "/schedule/phases/0/duration".
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pshift
