#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qmssb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
   public:
    using Error::Error;
};

/// A matrix or vector has the wrong shape.
class DimensionError : public Error {
   public:
    using Error::Error;
};

/// A covariance matrix is not positive semidefinite within tolerance.
class CovarianceError : public Error {
   public:
    using Error::Error;
};

/// An explicit step lost positivity, stability, or a conserved quantity.
class StepSizeError : public Error {
   public:
    using Error::Error;
};

/// A trajectory left the finite, bounded region.
class DivergenceError : public Error {
   public:
    DivergenceError(const std::string &what, double time, std::size_t trajectory_index = npos)
        : Error(what), time_(time), trajectory_index_(trajectory_index) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    double time() const noexcept { return time_; }
    std::size_t trajectory_index() const noexcept { return trajectory_index_; }

   private:
    double time_;
    std::size_t trajectory_index_;
};

/// Malformed or incomplete experiment configuration.
class ConfigError : public Error {
   public:
    using Error::Error;
};

}  // namespace qmssb
