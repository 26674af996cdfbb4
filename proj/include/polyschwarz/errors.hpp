#pragma once

#include <stdexcept>
#include <string>

namespace polyschwarz {

/// Input violates a documented precondition (bad dimension, point outside the
/// polydisk, non-normalized map where normalization is required, ...).
class precondition_error : public std::invalid_argument {
 public:
  explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A quantity that must be invertible or nonzero is numerically singular.
/// `magnitude` is the offending absolute value (pivot, denominator, Jacobian).
class singular_error : public std::runtime_error {
 public:
  singular_error(const std::string& what, double magnitude)
      : std::runtime_error(what), magnitude_(magnitude) {}
  double magnitude() const { return magnitude_; }

 private:
  double magnitude_ = 0.0;
};

/// A validation contour (Cauchy integration circle) leaves the domain where
/// the map is known to be holomorphic.
class contour_error : public std::runtime_error {
 public:
  explicit contour_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed serialized input (map description files, complex literals).
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace polyschwarz
