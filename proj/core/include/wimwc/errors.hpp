#pragma once

#include <stdexcept>
#include <string>

namespace wimwc {

/// Malformed or inconsistent input: bad names, shapes, probabilities, weights.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A dense tensor, enumeration, or grid would exceed the configured cap.
class SizeError : public std::length_error {
 public:
  explicit SizeError(const std::string& what) : std::length_error(what) {}
};

/// An iterative routine failed to produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wimwc
