#pragma once

#include <stdexcept>
#include <string>

namespace lamhb {

/// Iterative procedure failed to meet its tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual_(last_residual) {}

    [[nodiscard]] double last_residual() const { return last_residual_; }

private:
    double last_residual_;
};

/// Malformed or inconsistent configuration; `path` points at the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& path, const std::string& what)
        : std::runtime_error(what), path_(path) {}

    [[nodiscard]] const std::string& path() const { return path_; }

private:
    std::string path_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lamhb
