#pragma once

#include <stdexcept>
#include <string>

namespace toda {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid channel counts or tunnel couplings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The cumulant recurrence has a vanishing leading coefficient at this order.
class SingularOrderError : public Error {
 public:
  SingularOrderError(int order, const std::string& what)
      : Error(what), order_(order) {}
  int order() const noexcept { return order_; }

 private:
  int order_;
};

/// Not enough boundary data to run a recurrence to the requested depth.
class DepthError : public Error {
 public:
  DepthError(int required_order, const std::string& what)
      : Error(what), required_order_(required_order) {}
  int required_order() const noexcept { return required_order_; }

 private:
  int required_order_;
};

/// Integration, quadrature or linear-algebra failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An exact object does not have the algebraic shape an operation expects.
class ShapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace toda
