#pragma once

#include <stdexcept>
#include <string>

namespace roadfield {

/// Base class of all errors thrown by the library.
class Error : public std::runtime_error {
public:
    Error(std::string module, std::string op, const std::string& msg)
        : std::runtime_error("[" + module + "." + op + "] " + msg),
          module_(std::move(module)), op_(std::move(op)) {}

    const std::string& module() const noexcept { return module_; }
    const std::string& op() const noexcept { return op_; }

private:
    std::string module_;
    std::string op_;
};

/// Invalid argument values (nonpositive parameter, point off the network, ...).
class DomainError : public Error {
    using Error::Error;
};

/// Geometric construction failure (degenerate input, coincident constraints, ...).
class ConstructionError : public Error {
    using Error::Error;
};

/// Linear-algebra breakdown (factorization of a non-SPD matrix, ...).
class NumericalError : public Error {
    using Error::Error;
};

/// Iterative solver exceeded its budget; carries the best residual reached.
class ConvergenceError : public Error {
public:
    ConvergenceError(std::string module, std::string op, const std::string& msg,
                     double best_residual)
        : Error(std::move(module), std::move(op), msg), best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

/// Configuration file problems; carries a 1-based line number when known.
class ConfigError : public Error {
public:
    ConfigError(std::string module, std::string op, const std::string& msg, int line = 0)
        : Error(std::move(module), std::move(op),
                line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// File read/write failure.
class IoError : public Error {
    using Error::Error;
};

} // namespace roadfield
