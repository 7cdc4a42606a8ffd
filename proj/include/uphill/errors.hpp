#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace uphill {

// Every error carries the name of the module that raised it so the CLI can
// report where a pipeline failed.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class IterationLimitError : public Error {
public:
    IterationLimitError(std::string module, const std::string& what, double last_residual)
        : Error(std::move(module), what), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

class NonContractiveError : public Error {
public:
    NonContractiveError(std::string module, const std::string& what, double gamma)
        : Error(std::move(module), what), gamma_(gamma) {}

    double gamma() const noexcept { return gamma_; }

private:
    double gamma_;
};

class BracketError : public Error {
public:
    BracketError(std::string module, const std::string& what, double mu_low_current,
                 double mu_high_current)
        : Error(std::move(module), what),
          mu_low_current_(mu_low_current),
          mu_high_current_(mu_high_current) {}

    // boundary value reached with the smaller / larger trial current
    double mu_low_current() const noexcept { return mu_low_current_; }
    double mu_high_current() const noexcept { return mu_high_current_; }

private:
    double mu_low_current_;
    double mu_high_current_;
};

class DiagnosticError : public Error {
public:
    using Error::Error;
};

}  // namespace uphill
