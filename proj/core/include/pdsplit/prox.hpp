#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>

#include "pdsplit/vec.hpp"

namespace pdsplit {

inline constexpr double plus_infinity = std::numeric_limits<double>::infinity();

// A proper convex lsc function accessed through its proximal map.
//
// prox(step, x) returns the unique minimizer of step * f(y) + 0.5 * ||y - x||^2,
// which is also the resolvent J_{step * df}. A Proximable therefore doubles as
// the maximally monotone operator df wherever a resolvent is all that is needed.
//
// value() is extended-real: indicator-type functions return plus_infinity
// outside their domain instead of throwing.
class Proximable {
 public:
  virtual ~Proximable() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  // out may alias x.
  virtual void prox(double step, std::span<const double> x, std::span<double> out) const = 0;
  // Fenchel conjugate f^*(p). Default: unsupported_operation.
  virtual double conjugate_value(std::span<const double> p) const;

  Vec prox(double step, std::span<const double> x) const;
};

using ProximablePtr = std::shared_ptr<const Proximable>;

// Weighted mixed norm alpha * ||y||_{1,w}: y holds k stacked planes of length P
// (plane j is y[j*P .. (j+1)*P)), and the norm sums, over pixels p,
// sqrt(sum_j w_j * y[j*P + p]^2).
struct GroupNormParams {
  std::size_t block_size = 2;
  Vec weights{1.0, 1.0};
  double alpha = 1.0;

  void validate() const;
  bool uniform_weights() const;
};

// f = 0. Its conjugate, the indicator of {0}, accepts entries up to 1e-12 in
// magnitude so that rounding in x - gamma (x / gamma) is not mistaken for a
// leaving of the domain.
class ZeroFunction final : public Proximable {
 public:
  explicit ZeroFunction(std::size_t n);
  std::size_t dim() const override { return n_; }
  std::string name() const override { return "zero"; }
  double value(std::span<const double> x) const override;
  void prox(double step, std::span<const double> x, std::span<double> out) const override;
  double conjugate_value(std::span<const double> p) const override;
  using Proximable::prox;

 private:
  std::size_t n_;
};

// f = (c/2) ||x||^2. With c = 1 this is the function whose subdifferential is Id.
class SquaredNorm final : public Proximable {
 public:
  SquaredNorm(std::size_t n, double c = 1.0);
  std::size_t dim() const override { return n_; }
  std::string name() const override { return "squared norm"; }
  double value(std::span<const double> x) const override;
  void prox(double step, std::span<const double> x, std::span<double> out) const override;
  double conjugate_value(std::span<const double> p) const override;
  double weight() const { return c_; }
  using Proximable::prox;

 private:
  std::size_t n_;
  double c_;
};

// f = 0.5 ||x - b||^2.
class QuadraticFidelity final : public Proximable {
 public:
  explicit QuadraticFidelity(Vec b);
  std::size_t dim() const override { return b_.size(); }
  std::string name() const override { return "quadratic fidelity"; }
  double value(std::span<const double> x) const override;
  void prox(double step, std::span<const double> x, std::span<double> out) const override;
  double conjugate_value(std::span<const double> p) const override;
  const Vec& data() const { return b_; }
  using Proximable::prox;

 private:
  Vec b_;
};

// f = alpha * ||y||_{1,w} over `planes` pixels. Conjugate is the indicator of
// the product of ellipsoids {p : sum_j p_j^2 / w_j <= alpha^2}.
class GroupNorm final : public Proximable {
 public:
  GroupNorm(GroupNormParams params, std::size_t planes);
  std::size_t dim() const override { return params_.block_size * planes_; }
  std::string name() const override { return "group norm"; }
  double value(std::span<const double> x) const override;
  void prox(double step, std::span<const double> x, std::span<double> out) const override;
  // Membership is tested with a relative slack of 1e-9 so that points produced
  // by the projection itself are not rejected by rounding.
  double conjugate_value(std::span<const double> p) const override;
  const GroupNormParams& params() const { return params_; }
  std::size_t planes() const { return planes_; }
  using Proximable::prox;

 private:
  GroupNormParams params_;
  std::size_t planes_;
};

// Indicator of the box [lo, hi]^n; prox is the clamp.
class BoxIndicator final : public Proximable {
 public:
  BoxIndicator(std::size_t n, double lo, double hi);
  std::size_t dim() const override { return n_; }
  std::string name() const override { return "box indicator"; }
  double value(std::span<const double> x) const override;
  void prox(double step, std::span<const double> x, std::span<double> out) const override;
  double conjugate_value(std::span<const double> p) const override;
  using Proximable::prox;

 private:
  std::size_t n_;
  double lo_;
  double hi_;
};

// Prox_{gamma f^*}(x) = x - gamma * Prox_{f/gamma}(x / gamma).
Vec prox_conjugate(const Proximable& f, double gamma, std::span<const double> x);
void prox_conjugate(const Proximable& f, double gamma, std::span<const double> x,
                    std::span<double> out);

// J_{theta B^{-1}}(x) = x - theta * J_{B/theta}(x / theta). For B = dg this is
// Prox_{theta g^*}(x).
Vec resolvent_of_inverse(const Proximable& b, double theta, std::span<const double> x);
void resolvent_of_inverse(const Proximable& b, double theta, std::span<const double> x,
                          std::span<double> out);

// Prox of step * alpha * ||.||_{1,w}. Uniform weights use block shrinkage;
// otherwise x - P_E(x) with E the scaled ellipsoid, solved per pixel by a
// safeguarded Newton iteration on the scalar multiplier.
Vec prox_group_norm(const GroupNormParams& params, double step, std::span<const double> y);
void prox_group_norm(const GroupNormParams& params, double step, std::span<const double> y,
                     std::span<double> out);

// (x + tau * b) / (1 + tau)
Vec prox_quadratic_fidelity(std::span<const double> b, double tau, std::span<const double> x);
Vec prox_zero(double step, std::span<const double> x);
// x - b, the 1-Lipschitz gradient of 0.5 ||x - b||^2.
Vec gradient_quadratic_fidelity(std::span<const double> b, std::span<const double> x);

}  // namespace pdsplit
