#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pdsplit/problem.hpp"

namespace pdsplit::oracle {

using Objective = std::function<double(std::span<const double>)>;

// argmin_y gamma f(y) + 0.5 ||y - x||^2 for dim(x) <= 3 by nested golden-section
// search over the box x +- radius (radius <= 0 picks 4 (1 + ||x||_inf) and
// doubles it while the minimizer touches the box). f must be finite on the
// box; a non-finite value raises parameter_error. `tol` is the final
// bracket width in each coordinate.
Vec prox_by_minimization(const Objective& f, double gamma, std::span<const double> x,
                         double tol = 1e-10, double radius = 0.0);

struct ReferenceOptions {
  std::size_t subgradient_iters = 1'000'000;
  double subgradient_step = 0.5;  // a in a / sqrt(k)
  double final_smoothing = 1e-10;
};

struct ReferenceResult {
  Vec x;
  std::vector<Vec> y;
  double objective = 0.0;             // exact (unsmoothed) joint objective at (x, y)
  double subgradient_objective = 0.0;  // best value seen in the subgradient phase
  bool certified = false;             // refinement stabilized
};

// Minimizes the joint objective
//   f(x) + sum_i [g_i(K_i(L_i x - r_i - y_i)) + l_i(M_i y_i)] + h(x) - <x, z>
// over (x, y) with dense linear algebra: a subgradient phase with diminishing
// normalized steps and best-iterate tracking, then Newton continuation on a
// smoothed objective. Never calls a prox or resolvent. Supports f, g_i, l_i in
// {zero, squared norm, quadratic fidelity, group norm} and C in {zero,
// fidelity gradient}; anything else raises unsupported_operation. Total
// dimension n + sum_i dim G_i must not exceed 256.
ReferenceResult reference_solve(const ProblemSpec& spec, const ReferenceOptions& opt = {});

// The same joint objective, evaluated exactly with the oracle's own formulas.
double joint_objective(const ProblemSpec& spec, std::span<const double> x,
                       std::span<const Vec> y);

}  // namespace pdsplit::oracle
