#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "pdsplit/errors.hpp"

namespace pdsplit {

using Vec = std::vector<double>;

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw dimension_error(std::string(what) + ": expected length " + std::to_string(a) +
                          ", got " + std::to_string(b));
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "squared_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  require_same_size(y.size(), x.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace pdsplit
