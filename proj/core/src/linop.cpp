#include "pdsplit/linop.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

namespace pdsplit {

void GridShape::validate() const {
  if (rows == 0 || cols == 0) throw dimension_error("grid shape must have rows, cols >= 1");
  if (channels != 1 && channels != 3) throw dimension_error("grid shape must have 1 or 3 channels");
}

LinearMap::LinearMap(std::size_t in_dim, std::size_t out_dim, double norm_bound,
                     std::shared_ptr<const Impl> impl, std::string name)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      norm_bound_(norm_bound),
      impl_(std::move(impl)),
      name_(std::move(name)) {
  if (in_dim_ == 0 || out_dim_ == 0) throw dimension_error(name_ + ": zero dimension");
  if (!(norm_bound_ >= 0.0) || !std::isfinite(norm_bound_)) {
    throw parameter_error(name_ + ": norm bound must be finite and nonnegative");
  }
  if (!impl_) throw parameter_error(name_ + ": missing implementation");
}

void LinearMap::apply(std::span<const double> x, std::span<double> y) const {
  require_same_size(in_dim_, x.size(), "LinearMap::apply input");
  require_same_size(out_dim_, y.size(), "LinearMap::apply output");
  impl_->apply(x, y);
}

void LinearMap::apply_adjoint(std::span<const double> y, std::span<double> x) const {
  require_same_size(out_dim_, y.size(), "LinearMap::apply_adjoint input");
  require_same_size(in_dim_, x.size(), "LinearMap::apply_adjoint output");
  impl_->adjoint(y, x);
}

Vec LinearMap::operator()(std::span<const double> x) const {
  Vec y(out_dim_);
  apply(x, y);
  return y;
}

Vec LinearMap::adjoint(std::span<const double> y) const {
  Vec x(in_dim_);
  apply_adjoint(y, x);
  return x;
}

namespace {

// Strided 1-D kernels. `n` samples at v[off], v[off + stride], ...

void diff_forward(std::span<const double> v, std::span<double> out, std::size_t off,
                  std::size_t stride, std::size_t n) {
  for (std::size_t j = 0; j + 1 < n; ++j) {
    out[off + j * stride] = v[off + (j + 1) * stride] - v[off + j * stride];
  }
  out[off + (n - 1) * stride] = 0.0;
}

void diff_adjoint(std::span<const double> w, std::span<double> out, std::size_t off,
                  std::size_t stride, std::size_t n) {
  if (n == 1) {
    out[off] = 0.0;
    return;
  }
  out[off] = -w[off];
  for (std::size_t j = 1; j + 1 < n; ++j) {
    out[off + j * stride] = w[off + (j - 1) * stride] - w[off + j * stride];
  }
  out[off + (n - 1) * stride] = w[off + (n - 2) * stride];
}

// -D^T D v, a three-point Laplacian with the boundary rows implied by D's zero last row.
void neg_laplacian(std::span<const double> v, std::span<double> out, std::size_t off,
                   std::size_t stride, std::size_t n) {
  if (n == 1) {
    out[off] = 0.0;
    return;
  }
  auto at = [&](std::size_t j) { return v[off + j * stride]; };
  out[off] = at(1) - at(0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    out[off + j * stride] = at(j - 1) - 2.0 * at(j) + at(j + 1);
  }
  out[off + (n - 1) * stride] = at(n - 2) - at(n - 1);
}

enum class Axis { vertical, horizontal };

using Kernel = void (*)(std::span<const double>, std::span<double>, std::size_t, std::size_t,
                        std::size_t);

// Runs a 1-D kernel along every column (vertical) or row (horizontal) of every channel.
void sweep(const GridShape& s, Axis axis, Kernel kernel, std::span<const double> in,
           std::span<double> out) {
  const std::size_t m = s.rows;
  const std::size_t n = s.cols;
  for (std::size_t c = 0; c < s.channels; ++c) {
    const std::size_t base = c * s.plane_size();
    if (axis == Axis::vertical) {
      for (std::size_t col = 0; col < n; ++col) kernel(in, out, base + col * m, 1, m);
    } else {
      for (std::size_t row = 0; row < m; ++row) kernel(in, out, base + row, m, n);
    }
  }
}

class GridKernelMap final : public LinearMap::Impl {
 public:
  GridKernelMap(GridShape s, Axis axis, Kernel fwd, Kernel adj)
      : s_(s), axis_(axis), fwd_(fwd), adj_(adj) {}
  void apply(std::span<const double> x, std::span<double> y) const override {
    sweep(s_, axis_, fwd_, x, y);
  }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    sweep(s_, axis_, adj_, y, x);
  }

 private:
  GridShape s_;
  Axis axis_;
  Kernel fwd_;
  Kernel adj_;
};

class IdentityMap final : public LinearMap::Impl {
 public:
  void apply(std::span<const double> x, std::span<double> y) const override {
    std::copy(x.begin(), x.end(), y.begin());
  }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    std::copy(y.begin(), y.end(), x.begin());
  }
};

class ScaledMap final : public LinearMap::Impl {
 public:
  ScaledMap(double c, LinearMap op) : c_(c), op_(std::move(op)) {}
  void apply(std::span<const double> x, std::span<double> y) const override {
    op_.apply(x, y);
    for (double& v : y) v *= c_;
  }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    op_.apply_adjoint(y, x);
    for (double& v : x) v *= c_;
  }

 private:
  double c_;
  LinearMap op_;
};

class ComposedMap final : public LinearMap::Impl {
 public:
  ComposedMap(LinearMap outer, LinearMap inner) : outer_(std::move(outer)), inner_(std::move(inner)) {}
  void apply(std::span<const double> x, std::span<double> y) const override {
    Vec mid(inner_.out_dim());
    inner_.apply(x, mid);
    outer_.apply(mid, y);
  }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    Vec mid(outer_.in_dim());
    outer_.apply_adjoint(y, mid);
    inner_.apply_adjoint(mid, x);
  }

 private:
  LinearMap outer_;
  LinearMap inner_;
};

class StackedMap final : public LinearMap::Impl {
 public:
  explicit StackedMap(std::vector<LinearMap> blocks) : blocks_(std::move(blocks)) {}
  void apply(std::span<const double> x, std::span<double> y) const override {
    std::size_t off = 0;
    for (const auto& b : blocks_) {
      b.apply(x, y.subspan(off, b.out_dim()));
      off += b.out_dim();
    }
  }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    std::fill(x.begin(), x.end(), 0.0);
    Vec part(x.size());
    std::size_t off = 0;
    for (const auto& b : blocks_) {
      b.apply_adjoint(y.subspan(off, b.out_dim()), part);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += part[i];
      off += b.out_dim();
    }
  }

 private:
  std::vector<LinearMap> blocks_;
};

class BlockDiagonalMap final : public LinearMap::Impl {
 public:
  explicit BlockDiagonalMap(std::vector<LinearMap> blocks) : blocks_(std::move(blocks)) {}
  void apply(std::span<const double> x, std::span<double> y) const override {
    std::size_t in = 0, out = 0;
    for (const auto& b : blocks_) {
      b.apply(x.subspan(in, b.in_dim()), y.subspan(out, b.out_dim()));
      in += b.in_dim();
      out += b.out_dim();
    }
  }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    std::size_t in = 0, out = 0;
    for (const auto& b : blocks_) {
      b.apply_adjoint(y.subspan(out, b.out_dim()), x.subspan(in, b.in_dim()));
      in += b.in_dim();
      out += b.out_dim();
    }
  }

 private:
  std::vector<LinearMap> blocks_;
};

class TransposedMap final : public LinearMap::Impl {
 public:
  explicit TransposedMap(LinearMap op) : op_(std::move(op)) {}
  void apply(std::span<const double> x, std::span<double> y) const override {
    op_.apply_adjoint(x, y);
  }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    op_.apply(y, x);
  }

 private:
  LinearMap op_;
};

// Delegates to another map; used to attach a tighter analytic bound or a name.
class ForwardingMap final : public LinearMap::Impl {
 public:
  explicit ForwardingMap(LinearMap op) : op_(std::move(op)) {}
  void apply(std::span<const double> x, std::span<double> y) const override { op_.apply(x, y); }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    op_.apply_adjoint(y, x);
  }

 private:
  LinearMap op_;
};

class DenseMap final : public LinearMap::Impl {
 public:
  DenseMap(std::size_t rows, std::size_t cols, Vec a) : rows_(rows), cols_(cols), a_(std::move(a)) {}
  void apply(std::span<const double> x, std::span<double> y) const override {
    for (std::size_t i = 0; i < rows_; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += a_[i * cols_ + j] * x[j];
      y[i] = s;
    }
  }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) x[j] += a_[i * cols_ + j] * y[i];
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  Vec a_;
};

class CountedMap final : public LinearMap::Impl {
 public:
  CountedMap(LinearMap op, std::shared_ptr<ApplicationCounter> counter)
      : op_(std::move(op)), counter_(std::move(counter)) {}
  void apply(std::span<const double> x, std::span<double> y) const override {
    counter_->forward.fetch_add(1, std::memory_order_relaxed);
    op_.apply(x, y);
  }
  void adjoint(std::span<const double> y, std::span<double> x) const override {
    counter_->adjoint.fetch_add(1, std::memory_order_relaxed);
    op_.apply_adjoint(y, x);
  }

 private:
  LinearMap op_;
  std::shared_ptr<ApplicationCounter> counter_;
};

// Analytic bounds: ||D_k||^2 <= 4, hence ||D_x||, ||D_y|| <= 2, ||[D_x; D_y]|| <= sqrt(8),
// ||D_xx||, ||D_yy|| <= 4 and ||[D_xx; D_yy]|| <= sqrt(32).
constexpr double kDiffBound = 2.0;

}  // namespace

Vec forward_difference_apply(std::size_t k, std::span<const double> v) {
  if (k == 0) throw dimension_error("forward_difference_apply: k must be positive");
  require_same_size(k, v.size(), "forward_difference_apply");
  Vec out(k);
  diff_forward(v, out, 0, 1, k);
  return out;
}

Vec forward_difference_adjoint(std::size_t k, std::span<const double> v) {
  if (k == 0) throw dimension_error("forward_difference_adjoint: k must be positive");
  require_same_size(k, v.size(), "forward_difference_adjoint");
  Vec out(k);
  diff_adjoint(v, out, 0, 1, k);
  return out;
}

LinearMap identity(std::size_t n) {
  return LinearMap(n, n, 1.0, std::make_shared<IdentityMap>(), "identity");
}

LinearMap scale(double c, const LinearMap& op) {
  if (!std::isfinite(c)) throw parameter_error("scale: factor must be finite");
  return LinearMap(op.in_dim(), op.out_dim(), std::abs(c) * op.norm_bound(),
                   std::make_shared<ScaledMap>(c, op), "scaled " + op.name());
}

LinearMap compose(const LinearMap& outer, const LinearMap& inner) {
  if (outer.in_dim() != inner.out_dim()) {
    throw dimension_error("compose: " + outer.name() + " expects " +
                          std::to_string(outer.in_dim()) + " inputs but " + inner.name() +
                          " produces " + std::to_string(inner.out_dim()));
  }
  return LinearMap(inner.in_dim(), outer.out_dim(), outer.norm_bound() * inner.norm_bound(),
                   std::make_shared<ComposedMap>(outer, inner),
                   outer.name() + " o " + inner.name());
}

LinearMap stack(const std::vector<LinearMap>& blocks) {
  if (blocks.empty()) throw dimension_error("stack: no blocks");
  std::size_t out = 0;
  double bound_sq = 0.0;
  for (const auto& b : blocks) {
    if (b.in_dim() != blocks.front().in_dim()) throw dimension_error("stack: input dims differ");
    out += b.out_dim();
    bound_sq += b.norm_bound() * b.norm_bound();
  }
  return LinearMap(blocks.front().in_dim(), out, std::sqrt(bound_sq),
                   std::make_shared<StackedMap>(blocks), "stack");
}

LinearMap block_diagonal(const std::vector<LinearMap>& blocks) {
  if (blocks.empty()) throw dimension_error("block_diagonal: no blocks");
  std::size_t in = 0, out = 0;
  double bound = 0.0;
  for (const auto& b : blocks) {
    in += b.in_dim();
    out += b.out_dim();
    bound = std::max(bound, b.norm_bound());
  }
  return LinearMap(in, out, bound, std::make_shared<BlockDiagonalMap>(blocks), "block diagonal");
}

LinearMap transpose(const LinearMap& op) {
  return LinearMap(op.out_dim(), op.in_dim(), op.norm_bound(),
                   std::make_shared<TransposedMap>(op), op.name() + "^T");
}

LinearMap dense(std::size_t rows, std::size_t cols, Vec row_major) {
  require_same_size(rows * cols, row_major.size(), "dense");
  const double fro = norm(row_major);
  return LinearMap(cols, rows, fro, std::make_shared<DenseMap>(rows, cols, std::move(row_major)),
                   "dense");
}

LinearMap make_dx(const GridShape& shape) {
  shape.validate();
  return LinearMap(shape.size(), shape.size(), kDiffBound,
                   std::make_shared<GridKernelMap>(shape, Axis::vertical, diff_forward, diff_adjoint),
                   "D_x");
}

LinearMap make_dy(const GridShape& shape) {
  shape.validate();
  return LinearMap(
      shape.size(), shape.size(), kDiffBound,
      std::make_shared<GridKernelMap>(shape, Axis::horizontal, diff_forward, diff_adjoint), "D_y");
}

LinearMap make_d1(const GridShape& shape) {
  auto op = stack({make_dx(shape), make_dy(shape)});
  return LinearMap(op.in_dim(), op.out_dim(), std::sqrt(8.0),
                   std::make_shared<ForwardingMap>(op), "D1");
}

LinearMap make_d2(const GridShape& shape) {
  shape.validate();
  LinearMap dxx(shape.size(), shape.size(), 4.0,
                std::make_shared<GridKernelMap>(shape, Axis::vertical, neg_laplacian, neg_laplacian),
                "D_xx");
  LinearMap dyy(
      shape.size(), shape.size(), 4.0,
      std::make_shared<GridKernelMap>(shape, Axis::horizontal, neg_laplacian, neg_laplacian),
      "D_yy");
  auto op = stack({dxx, dyy});
  return LinearMap(op.in_dim(), op.out_dim(), std::sqrt(32.0),
                   std::make_shared<ForwardingMap>(op), "D2");
}

LinearMap make_second_order_link(const GridShape& shape) {
  auto op = block_diagonal({scale(-1.0, transpose(make_dx(shape))),
                            scale(-1.0, transpose(make_dy(shape)))});
  return LinearMap(op.in_dim(), op.out_dim(), kDiffBound,
                   std::make_shared<ForwardingMap>(op), "second-order link");
}

double power_iteration_norm(const LinearMap& op, std::size_t iters, std::uint64_t seed) {
  if (iters == 0) throw parameter_error("power_iteration_norm: iters must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Vec v(op.in_dim());
  for (double& e : v) e = unif(rng);
  double nv = norm(v);
  if (nv == 0.0) {
    v[0] = 1.0;
    nv = 1.0;
  }
  for (double& e : v) e /= nv;

  Vec av(op.out_dim());
  Vec w(op.in_dim());
  double best = 0.0;
  for (std::size_t k = 0; k < iters; ++k) {
    op.apply(v, av);
    const double est = norm(av);
    best = std::max(best, est);
    if (est == 0.0) return best;
    op.apply_adjoint(av, w);
    const double nw = norm(w);
    if (nw == 0.0) return best;
    for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nw;
  }
  return best;
}

LinearMap counted(const LinearMap& op, std::shared_ptr<ApplicationCounter> counter) {
  if (!counter) throw parameter_error("counted: null counter");
  return LinearMap(op.in_dim(), op.out_dim(), op.norm_bound(),
                   std::make_shared<CountedMap>(op, std::move(counter)), op.name());
}

}  // namespace pdsplit
