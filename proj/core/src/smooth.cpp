#include "pdsplit/smooth.hpp"

#include <algorithm>
#include <cmath>

#include "pdsplit/prox.hpp"

namespace pdsplit {

double SmoothOperator::value(std::span<const double>) const {
  throw unsupported_operation(name() + ": no potential available");
}

double SmoothOperator::conjugate_value(std::span<const double>) const {
  throw unsupported_operation(name() + ": no conjugate potential available");
}

Vec SmoothOperator::operator()(std::span<const double> x) const {
  Vec out(dim());
  apply(x, out);
  return out;
}

ZeroOperator::ZeroOperator(std::size_t n, double mu) : n_(n), mu_(mu) {
  if (n == 0) throw dimension_error("zero operator: dimension must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw parameter_error("zero operator: mu must be > 0");
}

void ZeroOperator::apply(std::span<const double> x, std::span<double> out) const {
  require_same_size(n_, x.size(), "zero operator");
  std::fill(out.begin(), out.end(), 0.0);
}

double ZeroOperator::value(std::span<const double> x) const {
  require_same_size(n_, x.size(), "zero operator");
  return 0.0;
}

double ZeroOperator::conjugate_value(std::span<const double> w) const {
  require_same_size(n_, w.size(), "zero operator conjugate");
  return std::all_of(w.begin(), w.end(), [](double v) { return std::abs(v) <= 1e-12; }) ? 0.0 : plus_infinity;
}

FidelityGradient::FidelityGradient(Vec b) : b_(std::move(b)) {
  if (b_.empty()) throw dimension_error("fidelity gradient: empty data");
}

void FidelityGradient::apply(std::span<const double> x, std::span<double> out) const {
  require_same_size(b_.size(), x.size(), "fidelity gradient");
  for (std::size_t i = 0; i < b_.size(); ++i) out[i] = x[i] - b_[i];
}

double FidelityGradient::value(std::span<const double> x) const {
  return 0.5 * squared_distance(x, b_);
}

double FidelityGradient::conjugate_value(std::span<const double> w) const {
  return 0.5 * squared_norm(w) + dot(w, b_);
}

SkewLinearOperator::SkewLinearOperator(LinearMap s) : s_(std::move(s)) {
  if (s_.in_dim() != s_.out_dim()) throw dimension_error("skew operator must be square");
  if (!(s_.norm_bound() > 0.0)) throw parameter_error("skew operator: norm bound must be > 0");
}

void SkewLinearOperator::apply(std::span<const double> x, std::span<double> out) const {
  s_.apply(x, out);
}

}  // namespace pdsplit
