#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pdsplit/vec.hpp"

namespace pdsplit {

// Image grid. Vectors describing an image are laid out column-major per
// channel: index = channel * rows * cols + col * rows + row.
struct GridShape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t channels = 1;

  std::size_t plane_size() const { return rows * cols; }
  std::size_t size() const { return rows * cols * channels; }
  std::size_t index(std::size_t row, std::size_t col, std::size_t channel = 0) const {
    return channel * plane_size() + col * rows + row;
  }
  void validate() const;

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

// Matrix-free linear operator with a certified upper bound on its norm.
//
// LinearMap is a cheap value type: copies share the immutable implementation,
// so maps can be freely stored in problem descriptions and evaluated from
// several threads.
class LinearMap {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    // y = A x; y is fully overwritten.
    virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
    // x = A^* y; x is fully overwritten.
    virtual void adjoint(std::span<const double> y, std::span<double> x) const = 0;
  };

  LinearMap(std::size_t in_dim, std::size_t out_dim, double norm_bound,
            std::shared_ptr<const Impl> impl, std::string name = "linear map");

  std::size_t in_dim() const noexcept { return in_dim_; }
  std::size_t out_dim() const noexcept { return out_dim_; }
  double norm_bound() const noexcept { return norm_bound_; }
  const std::string& name() const noexcept { return name_; }

  void apply(std::span<const double> x, std::span<double> y) const;
  void apply_adjoint(std::span<const double> y, std::span<double> x) const;

  Vec operator()(std::span<const double> x) const;
  Vec adjoint(std::span<const double> y) const;

 private:
  std::size_t in_dim_;
  std::size_t out_dim_;
  double norm_bound_;
  std::shared_ptr<const Impl> impl_;
  std::string name_;
};

// D_k v: forward differences with a zero last row.
Vec forward_difference_apply(std::size_t k, std::span<const double> v);
// D_k^T v.
Vec forward_difference_adjoint(std::size_t k, std::span<const double> v);

LinearMap identity(std::size_t n);
LinearMap scale(double c, const LinearMap& op);
// outer o inner
LinearMap compose(const LinearMap& outer, const LinearMap& inner);
// Vertical concatenation [A_1; A_2; ...]; all blocks share in_dim.
LinearMap stack(const std::vector<LinearMap>& blocks);
// diag(A_1, A_2, ...)
LinearMap block_diagonal(const std::vector<LinearMap>& blocks);
LinearMap transpose(const LinearMap& op);
// Row-major dense matrix. Norm bound is the Frobenius norm.
LinearMap dense(std::size_t rows, std::size_t cols, Vec row_major);

// Column-wise vertical differences Id_N (x) D_M, applied per channel.
LinearMap make_dx(const GridShape& shape);
// Horizontal differences D_N (x) Id_M, applied per channel.
LinearMap make_dy(const GridShape& shape);
// [D_x; D_y], n -> 2n.
LinearMap make_d1(const GridShape& shape);
// [D_xx; D_yy] with D_xx = Id_N (x) (-D_M^T D_M), D_yy = (-D_N^T D_N) (x) Id_M.
LinearMap make_d2(const GridShape& shape);
// diag(-D_x^T, -D_y^T), 2n -> 2n. Satisfies make_d2 = link o make_d1.
LinearMap make_second_order_link(const GridShape& shape);

// Estimate of ||op|| by power iteration on op^* op. Deterministic in seed.
// The returned Rayleigh-quotient estimate never exceeds the true norm.
double power_iteration_norm(const LinearMap& op, std::size_t iters, std::uint64_t seed);

// Forward and adjoint application counts of wrapped operators.
struct ApplicationCounter {
  std::atomic<std::uint64_t> forward{0};
  std::atomic<std::uint64_t> adjoint{0};

  std::uint64_t total() const { return forward.load() + adjoint.load(); }
  void reset() {
    forward = 0;
    adjoint = 0;
  }
};

// Same operator, but every apply/adjoint increments `counter`.
LinearMap counted(const LinearMap& op, std::shared_ptr<ApplicationCounter> counter);

}  // namespace pdsplit
