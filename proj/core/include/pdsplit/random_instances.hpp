#pragma once

#include <cstdint>

#include "pdsplit/problem.hpp"

namespace pdsplit::testing {

struct RandomInstanceOptions {
  std::size_t min_n = 4;
  std::size_t max_n = 16;
  std::size_t max_blocks = 2;
  std::size_t max_block_dim = 7;  // dims of G_i, X_i, Y_i are drawn from [2, max_block_dim]
  bool allow_box = true;          // A is zero or a box indicator when set, zero otherwise
};

// Random convex instance with dense Gaussian L_i, K_i, M_i, C the gradient of
// 0.5 ||x - b||^2, g_i a weighted l1 norm and l_i either a weighted l1 norm or
// a squared norm. Every term is piecewise quadratic, so both schemes converge
// linearly and long runs reach machine precision.
ProblemSpec random_instance(std::uint64_t seed, const RandomInstanceOptions& opt = {});

}  // namespace pdsplit::testing
