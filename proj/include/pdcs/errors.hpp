#pragma once

#include <stdexcept>
#include <string>

namespace pdcs {

/// Input or configuration rejected before any computation (CLI exit code 2).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string &what) : std::invalid_argument(what) {}
};

/// A computation could not produce a trustworthy result (CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string &what) : std::runtime_error(what) {}
};

/// The resolvent (i omega + Gamma - M) is numerically singular at `omega`.
class SingularSystemError : public NumericalError {
public:
    SingularSystemError(double omega, double rcond);
    double omega() const noexcept { return omega_; }
    double rcond() const noexcept { return rcond_; }

private:
    double omega_;
    double rcond_;
};

void require(bool condition, const std::string &message);

} // namespace pdcs
