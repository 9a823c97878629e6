#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "pdsplit/linop.hpp"
#include "pdsplit/vec.hpp"

namespace pdsplit {

// Single-valued monotone operator C used as a forward step.
//
// lipschitz() is the constant mu of the problem: for cocoercive operators C is
// mu^{-1}-cocoercive (e.g. a mu-Lipschitz gradient), otherwise only
// mu-Lipschitz. Gradients may also expose their potential h and its conjugate
// for objective evaluation.
class SmoothOperator {
 public:
  virtual ~SmoothOperator() = default;

  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> out) const = 0;
  virtual double lipschitz() const = 0;
  virtual bool cocoercive() const = 0;
  virtual bool is_zero() const { return false; }

  // Potential h with C = grad h. Default: unsupported_operation.
  virtual double value(std::span<const double> x) const;
  virtual double conjugate_value(std::span<const double> w) const;

  Vec operator()(std::span<const double> x) const;
};

using SmoothOperatorPtr = std::shared_ptr<const SmoothOperator>;

// C = 0, the gradient of h = 0. mu is still carried because the step
// conditions are stated for a strictly positive mu.
class ZeroOperator final : public SmoothOperator {
 public:
  explicit ZeroOperator(std::size_t n, double mu = 1.0);
  std::size_t dim() const override { return n_; }
  std::string name() const override { return "zero operator"; }
  void apply(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const override { return mu_; }
  bool cocoercive() const override { return true; }
  bool is_zero() const override { return true; }
  double value(std::span<const double> x) const override;
  double conjugate_value(std::span<const double> w) const override;

 private:
  std::size_t n_;
  double mu_;
};

// grad of h(x) = 0.5 ||x - b||^2, mu = 1.
class FidelityGradient final : public SmoothOperator {
 public:
  explicit FidelityGradient(Vec b);
  std::size_t dim() const override { return b_.size(); }
  std::string name() const override { return "fidelity gradient"; }
  void apply(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const override { return 1.0; }
  bool cocoercive() const override { return true; }
  double value(std::span<const double> x) const override;
  // h^*(w) = 0.5 ||w||^2 + <w, b>
  double conjugate_value(std::span<const double> w) const override;
  const Vec& data() const { return b_; }

 private:
  Vec b_;
};

// C = S for a skew linear map (S^* = -S). Monotone and ||S||-Lipschitz but not
// cocoercive, so only the forward-backward-forward scheme accepts it.
class SkewLinearOperator final : public SmoothOperator {
 public:
  explicit SkewLinearOperator(LinearMap s);
  std::size_t dim() const override { return s_.in_dim(); }
  std::string name() const override { return "skew linear operator"; }
  void apply(std::span<const double> x, std::span<double> out) const override;
  double lipschitz() const override { return s_.norm_bound(); }
  bool cocoercive() const override { return false; }

 private:
  LinearMap s_;
};

}  // namespace pdsplit
