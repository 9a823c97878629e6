#include <gtest/gtest.h>

#include "pdsplit/imaging.hpp"
#include "pdsplit/oracle.hpp"
#include "pdsplit/random_instances.hpp"
#include "pdsplit/solvers.hpp"
#include "test_support.hpp"

using namespace pdsplit;

namespace {

bool mentions(const std::vector<std::string>& diag, const std::string& needle) {
  for (const auto& d : diag)
    if (d.find(needle) != std::string::npos) return true;
  return false;
}

std::vector<Vec> ys(const SolverState& s) {
  std::vector<Vec> out;
  for (const auto& b : s.blocks) out.push_back(b.y);
  return out;
}

// Instance with K_i = M_i, so q_i = p_i is always dual feasible.
ProblemSpec shared_km_instance(std::uint64_t seed) {
  ProblemSpec s = pdsplit::testing::random_instance(seed, {.allow_box = false});
  for (auto& b : s.blocks) {
    b.M = b.K;
    b.D = std::make_shared<GroupNorm>(GroupNormParams{1, {1.0}, 0.25}, b.K.out_dim());
  }
  return s;
}

}  // namespace

TEST(ValidateProblem, WellFormedModels) {
  const Image img{GridShape{5, 4, 1}, Vec(20, 0.5)};
  EXPECT_TRUE(validate_problem(build_ic_problem(img, {})).empty());
  EXPECT_TRUE(validate_problem(build_mic_problem(img, {Model::mic})).empty());
}

TEST(ValidateProblem, NamesTheBrokenBlock) {
  ProblemSpec s = pdsplit::testing::random_instance(3, {.max_blocks = 2});
  while (s.blocks.size() < 2) s.blocks.push_back(s.blocks.front());
  s.blocks[1].r.push_back(0.0);
  const auto diag = validate_problem(s);
  ASSERT_FALSE(diag.empty());
  EXPECT_TRUE(mentions(diag, "block 1"));
  EXPECT_TRUE(mentions(diag, "len(r)"));
  EXPECT_THROW(require_valid(s), dimension_error);
}

TEST(ValidateProblem, EmptyBlockListAndMissingParts) {
  ProblemSpec s = pdsplit::testing::random_instance(3);
  s.blocks.clear();
  EXPECT_TRUE(mentions(validate_problem(s), "m >= 1"));
  ProblemSpec t = pdsplit::testing::random_instance(4);
  t.blocks[0].B = nullptr;
  t.z.push_back(1.0);
  const auto diag = validate_problem(t);
  EXPECT_TRUE(mentions(diag, "B is missing"));
  EXPECT_TRUE(mentions(diag, "z has length"));
}

TEST(ValidateState, DetectsShapeAndNan) {
  const ProblemSpec s = pdsplit::testing::random_instance(6);
  SolverState st = SolverState::zeros(s);
  EXPECT_TRUE(validate_state(s, st).empty());
  st.blocks[0].v[0] = std::nan("");
  EXPECT_FALSE(validate_state(s, st).empty());
  SolverState st2 = SolverState::zeros(s);
  st2.blocks[0].p.pop_back();
  EXPECT_FALSE(validate_state(s, st2).empty());
}

TEST(OptimalityResidual, PureAndPositiveOffSolution) {
  const ProblemSpec s = pdsplit::testing::random_instance(10);
  SolveOptions so;
  so.stop.max_iters = 300000;
  so.stop.tol = 1e-15;
  so.stop.relative = false;
  const SolverState sol = solve(s, Method::fbf, so).state;
  const FbParams p = default_fb_params(s);
  const double r0 = optimality_residual(s, sol, p);
  EXPECT_LE(r0, 1e-12);
  EXPECT_EQ(r0, optimality_residual(s, sol, p));

  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    SolverState pert = sol;
    Vec d = test::gaussian(rng, s.n);
    const double nd = norm(d);
    for (std::size_t i = 0; i < s.n; ++i) pert.x[i] += 1e-2 * d[i] / nd;
    EXPECT_GT(optimality_residual(s, pert, p), 1e-8);
  }
  FbParams bad = p;
  bad.tau = 100.0;
  EXPECT_THROW(optimality_residual(s, sol, bad), parameter_error);
}

TEST(Objectives, ConstantImageHasZeroPrimal) {
  const GridShape g{6, 5, 1};
  const Image b{g, Vec(g.size(), 0.42)};
  for (Model m : {Model::ic, Model::mic}) {
    const ProblemSpec s = build_problem(b, ModelConfig{m});
    std::vector<Vec> y{Vec(s.blocks[0].L.out_dim(), 0.0)};
    EXPECT_EQ(evaluate_primal_objective(s, b.pixels, y), 0.0);
  }
}

TEST(Objectives, PrimalMatchesOracleFormula) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemSpec s = pdsplit::testing::random_instance(seed, {.allow_box = false});
    const Vec x = test::gaussian(rng, s.n);
    std::vector<Vec> y;
    for (const auto& b : s.blocks) y.push_back(test::gaussian(rng, b.L.out_dim()));
    const double a = evaluate_primal_objective(s, x, y);
    EXPECT_NEAR(a, oracle::joint_objective(s, x, y), 1e-12 * (1.0 + std::abs(a)));
  }
}

TEST(Objectives, DualFeasibilityFlag) {
  const ProblemSpec s = shared_km_instance(2);
  std::mt19937_64 rng(1);
  std::vector<Vec> p, q;
  for (const auto& b : s.blocks) {
    p.push_back(test::gaussian(rng, b.K.out_dim(), 0.05));
    q.push_back(test::gaussian(rng, b.M.out_dim(), 0.05));
  }
  const DualValue d = evaluate_dual_objective(s, p, q);
  EXPECT_FALSE(d.feasible);
  EXPECT_GT(d.max_violation, 1e-8);
  const DualValue e = evaluate_dual_objective(s, p, p);
  EXPECT_TRUE(e.feasible);
  EXPECT_EQ(e.max_violation, 0.0);
}

TEST(Objectives, DualNeedsSeparableConjugate) {
  ProblemSpec s = shared_km_instance(2);
  s.A = std::make_shared<SquaredNorm>(s.n);
  std::vector<Vec> p;
  for (const auto& b : s.blocks) p.push_back(Vec(b.K.out_dim(), 0.0));
  EXPECT_THROW(evaluate_dual_objective(s, p, p), unsupported_operation);
}

TEST(WeakDuality, RandomFeasibleDualPoints) {
  std::mt19937_64 rng(9);
  int feasible_finite = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ProblemSpec s = shared_km_instance(seed);
    for (int k = 0; k < 20; ++k) {
      const Vec x = test::gaussian(rng, s.n);
      std::vector<Vec> y, p;
      for (const auto& b : s.blocks) {
        y.push_back(test::gaussian(rng, b.L.out_dim(), 0.3));
        p.push_back(test::gaussian(rng, b.K.out_dim(), 0.1));
      }
      const DualValue d = evaluate_dual_objective(s, p, p);
      ASSERT_TRUE(d.feasible);
      const double primal = evaluate_primal_objective(s, x, y);
      EXPECT_GE(primal, d.value - 1e-9);
      if (std::isfinite(d.value)) ++feasible_finite;
    }
  }
  EXPECT_GT(feasible_finite, 50);
}

TEST(WeakDuality, GapClosesAtSolution) {
  const ProblemSpec s = shared_km_instance(4);
  SolveOptions so;
  so.stop.max_iters = 300000;
  so.stop.tol = 1e-14;
  so.stop.relative = false;
  const SolverState sol = solve(s, Method::fbf, so).state;
  std::vector<Vec> p, q;
  for (const auto& b : sol.blocks) {
    p.push_back(b.p);
    q.push_back(b.q);
  }
  const DualValue d = evaluate_dual_objective(s, p, q);
  ASSERT_TRUE(d.feasible) << d.max_violation;
  const double primal = evaluate_primal_objective(s, sol.x, ys(sol));
  EXPECT_GE(primal, d.value - 1e-9);
  EXPECT_LE(primal - d.value, 1e-6);
}
