#pragma once

#include <stdexcept>
#include <string>

namespace fusionlab {

/// Base class for every recoverable error raised by the library.
class FusionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class MalformedInput : public FusionError {
  public:
    using FusionError::FusionError;
};

class NotUnitary : public FusionError {
  public:
    explicit NotUnitary(double max_deviation);
    double max_deviation() const noexcept { return max_deviation_; }

  private:
    double max_deviation_;
};

class DegenerateSample : public FusionError {
  public:
    using FusionError::FusionError;
};

class OutOfRange : public FusionError {
  public:
    using FusionError::FusionError;
};

class ZeroProbabilityOutcome : public FusionError {
  public:
    using FusionError::FusionError;
};

class TooManyQubits : public FusionError {
  public:
    explicit TooManyQubits(int requested);
};

class ZeroOverlap : public FusionError {
  public:
    using FusionError::FusionError;
};

class ParseError : public FusionError {
  public:
    using FusionError::FusionError;
};

/// Raised when a closed-form quantity leaves its mathematically allowed range
/// by more than rounding can explain. Indicates a bug, not bad input.
class ConsistencyError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

}  // namespace fusionlab
