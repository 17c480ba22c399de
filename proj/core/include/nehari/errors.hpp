#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct GridError : Error {
  using Error::Error;
};

struct ExprError : Error {
  using Error::Error;
};

struct ModelError : Error {
  using Error::Error;
};

struct EigsError : Error {
  using Error::Error;
};

// Thrown when an operation that needs u inside the open cone A (the set where
// the squared gradient norm is dominated by the eta-weighted mass) receives a
// field on or outside its boundary.
struct NotInAError : Error {
  NotInAError(const std::string& what, double margin_)
      : Error(what), margin(margin_) {}
  double margin;  // integral(eta u^2) - |u|_{H10}^2 at the offending field
};

struct FiberingError : Error {
  using Error::Error;
};

// Fibering bracket grew past the overflow cap; the field is numerically
// indistinguishable from a boundary point of A.
struct BracketOverflowError : FiberingError {
  BracketOverflowError(const std::string& what, double t_reached_)
      : FiberingError(what), t_reached(t_reached_) {}
  double t_reached;
};

}  // namespace nehari
