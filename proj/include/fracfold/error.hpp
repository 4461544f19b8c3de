#pragma once

#include <stdexcept>
#include <string>

namespace fracfold {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative method hit its cap. Carries the last achieved residual.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// A structural property that must hold by construction was violated.
class InvariantError : public Error {
public:
    using Error::Error;
};

}  // namespace fracfold
