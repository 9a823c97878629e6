#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdsplit {

// Root of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector lengths or operator dimensions do not chain.
class dimension_error : public error {
 public:
  using error::error;
};

// A scalar parameter is outside its admissible range (step sizes, weights, ...).
class parameter_error : public error {
 public:
  using error::error;
};

// The object cannot provide the requested evaluation (e.g. a conjugate that
// has no closed form).
class unsupported_operation : public error {
 public:
  using error::error;
};

// A non-finite value appeared inside an iteration.
class numerical_divergence : public error {
 public:
  numerical_divergence(std::size_t iteration, const std::string& what)
      : error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class io_error : public error {
 public:
  using error::error;
};

}  // namespace pdsplit
