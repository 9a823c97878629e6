#include "pdsplit/prox.hpp"

#include <algorithm>
#include <cmath>

namespace pdsplit {

namespace {

void require_positive_step(double step, const char* what) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw parameter_error(std::string(what) + ": step must be a positive finite number");
  }
}

constexpr double kEllipsoidTol = 1e-12;
constexpr int kEllipsoidMaxIter = 100;

// Projection of v (length k) onto {p : sum_j p_j^2 / w_j <= r^2}, written to out.
// Outside the ellipsoid p_j = w_j v_j / (w_j + t) with t > 0 the root of
//   phi(t) = sum_j w_j v_j^2 / (w_j + t)^2 - r^2,
// which is convex and decreasing; Newton from the left converges monotonically,
// bisection keeps the bracket in case rounding pushes an iterate out.
void project_ellipsoid(std::span<const double> v, std::span<const double> w, double r,
                       std::span<double> out) {
  const std::size_t k = v.size();
  double q = 0.0;
  for (std::size_t j = 0; j < k; ++j) q += v[j] * v[j] / w[j];
  if (q <= r * r) {
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  if (r == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  double wv2 = 0.0;
  for (std::size_t j = 0; j < k; ++j) wv2 += w[j] * v[j] * v[j];

  auto phi = [&](double t, double* dphi) {
    double f = -r * r;
    double d = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double s = w[j] + t;
      const double a = w[j] * v[j] * v[j];
      f += a / (s * s);
      d -= 2.0 * a / (s * s * s);
    }
    *dphi = d;
    return f;
  };

  double lo = 0.0;
  double hi = std::sqrt(wv2) / r;  // phi(hi) <= 0
  double t = 0.0;
  for (int it = 0; it < kEllipsoidMaxIter; ++it) {
    double d = 0.0;
    const double f = phi(t, &d);
    if (f > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    if (std::abs(f) <= kEllipsoidTol * r * r || hi - lo <= kEllipsoidTol * std::max(1.0, hi)) break;
    double next = (d < 0.0) ? t - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  for (std::size_t j = 0; j < k; ++j) out[j] = w[j] * v[j] / (w[j] + t);
}

}  // namespace

double Proximable::conjugate_value(std::span<const double>) const {
  throw unsupported_operation(name() + ": conjugate has no closed form");
}

Vec Proximable::prox(double step, std::span<const double> x) const {
  Vec out(x.size());
  prox(step, x, out);
  return out;
}

// ---------------------------------------------------------------------------

void GroupNormParams::validate() const {
  if (block_size == 0) throw parameter_error("group norm: block size must be positive");
  if (weights.size() != block_size) {
    throw parameter_error("group norm: expected " + std::to_string(block_size) + " weights");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw parameter_error("group norm: weights must be > 0");
  }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw parameter_error("group norm: alpha must be > 0");
}

bool GroupNormParams::uniform_weights() const {
  return std::all_of(weights.begin(), weights.end(),
                     [&](double w) { return w == weights.front(); });
}

ZeroFunction::ZeroFunction(std::size_t n) : n_(n) {
  if (n == 0) throw dimension_error("zero function: dimension must be positive");
}

double ZeroFunction::value(std::span<const double> x) const {
  require_same_size(n_, x.size(), "zero function");
  return 0.0;
}

void ZeroFunction::prox(double step, std::span<const double> x, std::span<double> out) const {
  require_positive_step(step, "zero function prox");
  require_same_size(n_, x.size(), "zero function prox");
  std::copy(x.begin(), x.end(), out.begin());
}

double ZeroFunction::conjugate_value(std::span<const double> p) const {
  require_same_size(n_, p.size(), "zero function conjugate");
  return std::all_of(p.begin(), p.end(), [](double v) { return std::abs(v) <= 1e-12; }) ? 0.0 : plus_infinity;
}

SquaredNorm::SquaredNorm(std::size_t n, double c) : n_(n), c_(c) {
  if (n == 0) throw dimension_error("squared norm: dimension must be positive");
  if (!(c > 0.0) || !std::isfinite(c)) throw parameter_error("squared norm: weight must be > 0");
}

double SquaredNorm::value(std::span<const double> x) const {
  require_same_size(n_, x.size(), "squared norm");
  return 0.5 * c_ * squared_norm(x);
}

void SquaredNorm::prox(double step, std::span<const double> x, std::span<double> out) const {
  require_positive_step(step, "squared norm prox");
  require_same_size(n_, x.size(), "squared norm prox");
  const double s = 1.0 / (1.0 + step * c_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = s * x[i];
}

double SquaredNorm::conjugate_value(std::span<const double> p) const {
  require_same_size(n_, p.size(), "squared norm conjugate");
  return 0.5 * squared_norm(p) / c_;
}

QuadraticFidelity::QuadraticFidelity(Vec b) : b_(std::move(b)) {
  if (b_.empty()) throw dimension_error("quadratic fidelity: empty data");
}

double QuadraticFidelity::value(std::span<const double> x) const {
  return 0.5 * squared_distance(x, b_);
}

void QuadraticFidelity::prox(double step, std::span<const double> x, std::span<double> out) const {
  require_positive_step(step, "quadratic fidelity prox");
  require_same_size(b_.size(), x.size(), "quadratic fidelity prox");
  const double s = 1.0 / (1.0 + step);
  for (std::size_t i = 0; i < b_.size(); ++i) out[i] = (x[i] + step * b_[i]) * s;
}

double QuadraticFidelity::conjugate_value(std::span<const double> p) const {
  return 0.5 * squared_norm(p) + dot(p, b_);
}

GroupNorm::GroupNorm(GroupNormParams params, std::size_t planes)
    : params_(std::move(params)), planes_(planes) {
  params_.validate();
  if (planes_ == 0) throw dimension_error("group norm: plane length must be positive");
}

double GroupNorm::value(std::span<const double> x) const {
  require_same_size(dim(), x.size(), "group norm");
  const std::size_t k = params_.block_size;
  double total = 0.0;
  for (std::size_t p = 0; p < planes_; ++p) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double v = x[j * planes_ + p];
      s += params_.weights[j] * v * v;
    }
    total += std::sqrt(s);
  }
  return params_.alpha * total;
}

void GroupNorm::prox(double step, std::span<const double> x, std::span<double> out) const {
  require_same_size(dim(), x.size(), "group norm prox");
  prox_group_norm(params_, step, x, out);
}

double GroupNorm::conjugate_value(std::span<const double> p) const {
  require_same_size(dim(), p.size(), "group norm conjugate");
  const std::size_t k = params_.block_size;
  const double r2 = params_.alpha * params_.alpha;
  for (std::size_t i = 0; i < planes_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double v = p[j * planes_ + i];
      s += v * v / params_.weights[j];
    }
    if (s > r2 * (1.0 + 1e-9)) return plus_infinity;
  }
  return 0.0;
}

BoxIndicator::BoxIndicator(std::size_t n, double lo, double hi) : n_(n), lo_(lo), hi_(hi) {
  if (n == 0) throw dimension_error("box indicator: dimension must be positive");
  if (!(lo <= hi)) throw parameter_error("box indicator: lo must not exceed hi");
}

double BoxIndicator::value(std::span<const double> x) const {
  require_same_size(n_, x.size(), "box indicator");
  for (double v : x) {
    if (v < lo_ || v > hi_) return plus_infinity;
  }
  return 0.0;
}

void BoxIndicator::prox(double step, std::span<const double> x, std::span<double> out) const {
  require_positive_step(step, "box indicator prox");
  require_same_size(n_, x.size(), "box indicator prox");
  for (std::size_t i = 0; i < n_; ++i) out[i] = std::clamp(x[i], lo_, hi_);
}

double BoxIndicator::conjugate_value(std::span<const double> p) const {
  require_same_size(n_, p.size(), "box indicator conjugate");
  double s = 0.0;
  for (double v : p) s += std::max(lo_ * v, hi_ * v);
  return s;
}

// ---------------------------------------------------------------------------

void prox_conjugate(const Proximable& f, double gamma, std::span<const double> x,
                    std::span<double> out) {
  require_positive_step(gamma, "prox_conjugate");
  require_same_size(f.dim(), x.size(), "prox_conjugate");
  require_same_size(x.size(), out.size(), "prox_conjugate output");
  Vec scaled(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scaled[i] = x[i] / gamma;
  f.prox(1.0 / gamma, scaled, scaled);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - gamma * scaled[i];
}

Vec prox_conjugate(const Proximable& f, double gamma, std::span<const double> x) {
  Vec out(x.size());
  prox_conjugate(f, gamma, x, out);
  return out;
}

void resolvent_of_inverse(const Proximable& b, double theta, std::span<const double> x,
                          std::span<double> out) {
  require_positive_step(theta, "resolvent_of_inverse");
  prox_conjugate(b, theta, x, out);
}

Vec resolvent_of_inverse(const Proximable& b, double theta, std::span<const double> x) {
  Vec out(x.size());
  resolvent_of_inverse(b, theta, x, out);
  return out;
}

void prox_group_norm(const GroupNormParams& params, double step, std::span<const double> y,
                     std::span<double> out) {
  params.validate();
  require_positive_step(step, "prox_group_norm");
  const std::size_t k = params.block_size;
  if (y.size() % k != 0) {
    throw dimension_error("prox_group_norm: length " + std::to_string(y.size()) +
                          " is not a multiple of block size " + std::to_string(k));
  }
  require_same_size(y.size(), out.size(), "prox_group_norm output");
  const std::size_t planes = y.size() / k;
  const double radius = step * params.alpha;

  if (params.uniform_weights()) {
    // step * alpha * sqrt(w) * ||v||: block soft-thresholding.
    const double thresh = radius * std::sqrt(params.weights.front());
    for (std::size_t p = 0; p < planes; ++p) {
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += y[j * planes + p] * y[j * planes + p];
      const double nv = std::sqrt(s);
      const double factor = nv > thresh ? 1.0 - thresh / nv : 0.0;
      for (std::size_t j = 0; j < k; ++j) out[j * planes + p] = factor * y[j * planes + p];
    }
    return;
  }

  Vec v(k), proj(k);
  for (std::size_t p = 0; p < planes; ++p) {
    for (std::size_t j = 0; j < k; ++j) v[j] = y[j * planes + p];
    project_ellipsoid(v, params.weights, radius, proj);
    for (std::size_t j = 0; j < k; ++j) out[j * planes + p] = v[j] - proj[j];
  }
}

Vec prox_group_norm(const GroupNormParams& params, double step, std::span<const double> y) {
  Vec out(y.size());
  prox_group_norm(params, step, y, out);
  return out;
}

Vec prox_quadratic_fidelity(std::span<const double> b, double tau, std::span<const double> x) {
  require_positive_step(tau, "prox_quadratic_fidelity");
  require_same_size(b.size(), x.size(), "prox_quadratic_fidelity");
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] + tau * b[i]) / (1.0 + tau);
  return out;
}

Vec prox_zero(double step, std::span<const double> x) {
  require_positive_step(step, "prox_zero");
  return Vec(x.begin(), x.end());
}

Vec gradient_quadratic_fidelity(std::span<const double> b, std::span<const double> x) {
  require_same_size(b.size(), x.size(), "gradient_quadratic_fidelity");
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] - b[i];
  return g;
}

}  // namespace pdsplit
