#include "pdsplit/random_instances.hpp"

#include <cmath>
#include <random>

namespace pdsplit::testing {

namespace {

Vec gaussian(std::mt19937_64& g, std::size_t n, double s) {
  std::normal_distribution<double> nd(0.0, s);
  Vec v(n);
  for (double& e : v) e = nd(g);
  return v;
}

LinearMap gaussian_map(std::mt19937_64& g, std::size_t rows, std::size_t cols) {
  return dense(rows, cols, gaussian(g, rows * cols, 1.0 / std::sqrt(static_cast<double>(cols))));
}

std::size_t pick(std::mt19937_64& g, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(g() % (hi - lo + 1));
}

Vec positive_weights(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  return {u(g)};
}

}  // namespace

ProblemSpec random_instance(std::uint64_t seed, const RandomInstanceOptions& opt) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> weight(0.1, 0.5);
  ProblemSpec s;
  s.n = pick(g, opt.min_n, opt.max_n);
  s.z = gaussian(g, s.n, 0.1);
  if (opt.allow_box && g() % 2 == 0) {
    s.A = std::make_shared<BoxIndicator>(s.n, -0.5, 0.5);
  } else {
    s.A = std::make_shared<ZeroFunction>(s.n);
  }
  s.C = std::make_shared<FidelityGradient>(gaussian(g, s.n, 1.0));
  const std::size_t m = pick(g, 1, opt.max_blocks);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t gd = pick(g, 2, opt.max_block_dim);
    const std::size_t xd = pick(g, 2, opt.max_block_dim);
    const std::size_t yd = pick(g, 2, opt.max_block_dim);
    Block b{gaussian_map(g, gd, s.n), gaussian_map(g, xd, gd), gaussian_map(g, yd, gd),
            gaussian(g, gd, 0.1), nullptr, nullptr};
    b.B = std::make_shared<GroupNorm>(GroupNormParams{1, positive_weights(g), weight(g)}, xd);
    if (g() % 2 == 0) {
      b.D = std::make_shared<GroupNorm>(GroupNormParams{1, positive_weights(g), weight(g)}, yd);
    } else {
      b.D = std::make_shared<SquaredNorm>(yd, 2.0 * weight(g));
    }
    s.blocks.push_back(std::move(b));
  }
  return s;
}

}  // namespace pdsplit::testing
