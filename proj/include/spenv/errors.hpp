#pragma once

#include <stdexcept>
#include <string>

namespace spenv {

// Base class for every failure this library reports on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// numerics
struct BracketInvalid : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};
struct NoBracketFound : Error {
  using Error::Error;
};
struct NoSignChange : Error {
  using Error::Error;
};

// potential model
struct DomainViolation : Error {
  using Error::Error;
};
struct DegenerateBase : Error {
  using Error::Error;
};
struct NonMonotone : Error {
  using Error::Error;
};

// base spectra
struct UnsupportedExponent : Error {
  using Error::Error;
};

// kinetic potentials
struct NonAttractive : Error {
  using Error::Error;
};

// envelope / local-energy bounds
struct IndefiniteConvexity : Error {
  using Error::Error;
};
struct PairMismatch : Error {
  using Error::Error;
};
struct TrialZero : Error {
  using Error::Error;
};
struct NoRoot : Error {
  using Error::Error;
};
struct UnboundedInner : Error {
  using Error::Error;
};

// shooting oracle
struct NoBoundState : Error {
  using Error::Error;
};
struct TruncationTooSmall : Error {
  using Error::Error;
};

// command line
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace spenv
