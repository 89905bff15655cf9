// Exception hierarchy shared by all modules.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vanum {

/// Root of all library errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Evaluation outside a function's domain (e.g. log at a nonpositive point).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Structurally invalid call: dimension mismatch, bad flag value, out-of-range index.
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// A model ingredient failed construction-time or assumption validation.
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Problem size exceeds a configured cap.
class SizeError : public Error {
  public:
    using Error::Error;
};

/// An iterative solver hit its cap; carries the best iterate and its residual.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& msg, std::vector<double> best_iterate, double residual)
        : Error(msg), best_iterate_(std::move(best_iterate)), residual_(residual) {}

    const std::vector<double>& best_iterate() const { return best_iterate_; }
    double residual() const { return residual_; }

  private:
    std::vector<double> best_iterate_;
    double residual_;
};

}  // namespace vanum
