#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pdsplit/linop.hpp"
#include "pdsplit/prox.hpp"
#include "pdsplit/smooth.hpp"

namespace pdsplit {

// One term L^*((K^* B K) [] (M^* D M))(L x - r) of the primal inclusion,
// where [] is the parallel sum.
//   L : H -> G,  K : G -> X,  M : G -> Y,  r in G,
//   B on X and D on Y are accessed through their resolvents.
struct Block {
  LinearMap L;
  LinearMap K;
  LinearMap M;
  Vec r;
  ProximablePtr B;
  ProximablePtr D;
};

// Find x with z in A x + sum_i L_i^*((K_i^* B_i K_i) [] (M_i^* D_i M_i))(L_i x - r_i) + C x.
//
// When A, B_i, D_i are subdifferentials of f, g_i, l_i and C = grad h, the same
// object describes the convex problem
//   min_x f(x) + sum_i ((g_i o K_i) [] (l_i o M_i))(L_i x - r_i) + h(x) - <x, z>
// together with its conjugate dual.
struct ProblemSpec {
  std::size_t n = 0;
  Vec z;
  ProximablePtr A;
  SmoothOperatorPtr C;
  std::vector<Block> blocks;

  double mu() const { return C->lipschitz(); }
};

struct BlockState {
  Vec p;  // in X_i
  Vec q;  // in Y_i
  Vec z;  // in G_i
  Vec y;  // in G_i
  Vec v;  // in G_i
};

// Iterate (x, {p_i}, {q_i}, {z_i}, {y_i}, {v_i}) shared by both splitting schemes.
struct SolverState {
  Vec x;
  std::vector<BlockState> blocks;

  static SolverState zeros(const ProblemSpec& spec);

  // Euclidean distance over the concatenated tuple.
  double distance(const SolverState& other) const;
  double squared_distance(const SolverState& other) const;
  bool finite() const;
};

// Empty when the problem is well formed; otherwise one message per violated
// invariant, naming the block.
std::vector<std::string> validate_problem(const ProblemSpec& spec);
// Throws dimension_error listing every diagnostic.
void require_valid(const ProblemSpec& spec);
std::vector<std::string> validate_state(const ProblemSpec& spec, const SolverState& state);

struct FbParams;

// ||T(state) - state|| where T is one undamped forward-backward sweep
// (lambda = 1, no errors). Zero exactly at primal-dual solutions.
// Throws parameter_error if the step sizes fail certification.
double optimality_residual(const ProblemSpec& spec, const SolverState& state,
                           const FbParams& params);

// f(x) + sum_i [g_i(K_i(L_i x - r_i - y_i)) + l_i(M_i y_i)] + h(x) - <x, z>.
// For any certificate y this bounds the infimal-convolution objective from above.
double evaluate_primal_objective(const ProblemSpec& spec, std::span<const double> x,
                                 std::span<const Vec> y);

struct DualValue {
  bool feasible = false;
  double value = 0.0;          // meaningful only when feasible; may be -inf
  double max_violation = 0.0;  // max_i ||K_i^* p_i - M_i^* q_i||
};

inline constexpr double kDefaultDualFeasibilityTol = 1e-8;

// -(f^* [] h^*)(z - sum_i L_i^* K_i^* p_i) - sum_i [g_i^*(p_i) + l_i^*(q_i) + <p_i, K_i r_i>]
// on the constraint set K_i^* p_i = M_i^* q_i. Infimal convolution of the
// conjugates is only available when f = 0 or h = 0; otherwise
// unsupported_operation.
DualValue evaluate_dual_objective(const ProblemSpec& spec, std::span<const Vec> p,
                                  std::span<const Vec> q,
                                  double feas_tol = kDefaultDualFeasibilityTol);

}  // namespace pdsplit
