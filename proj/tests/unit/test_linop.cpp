#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "pdsplit/linop.hpp"
#include "test_support.hpp"

using namespace pdsplit;
using pdsplit::test::gaussian;

namespace {

double adjoint_gap(const LinearMap& op, std::mt19937_64& rng) {
  const Vec x = gaussian(rng, op.in_dim());
  const Vec y = gaussian(rng, op.out_dim());
  const Vec ax = op(x);
  return std::abs(dot(ax, y) - dot(x, op.adjoint(y))) / (1.0 + norm(ax) * norm(y));
}

Eigen::MatrixXd materialize(const LinearMap& op) {
  Eigen::MatrixXd m(op.out_dim(), op.in_dim());
  Vec e(op.in_dim(), 0.0);
  for (std::size_t j = 0; j < op.in_dim(); ++j) {
    e[j] = 1.0;
    const Vec c = op(e);
    for (std::size_t i = 0; i < c.size(); ++i) m(i, j) = c[i];
    e[j] = 0.0;
  }
  return m;
}

}  // namespace

TEST(ForwardDifference, AppliesDisplayedMatrix) {
  EXPECT_EQ(forward_difference_apply(3, Vec{1, 2, 4}), (Vec{1, 2, 0}));
  EXPECT_EQ(forward_difference_apply(4, Vec{5, 5, 5, 5}), (Vec{0, 0, 0, 0}));
  EXPECT_EQ(forward_difference_apply(2, Vec{0, 1}), (Vec{1, 0}));
}

TEST(ForwardDifference, AdjointColumns) {
  EXPECT_EQ(forward_difference_adjoint(3, Vec{1, 0, 0}), (Vec{-1, 1, 0}));
  EXPECT_EQ(forward_difference_adjoint(3, Vec{0, 0, 1}), (Vec{0, 0, 0}));
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const Vec x = gaussian(rng, 7), y = gaussian(rng, 7);
    EXPECT_NEAR(dot(forward_difference_apply(7, x), y), dot(x, forward_difference_adjoint(7, y)),
                1e-12);
  }
}

TEST(ForwardDifference, RejectsWrongLength) {
  EXPECT_THROW(forward_difference_apply(3, Vec{1, 2}), dimension_error);
  EXPECT_THROW(forward_difference_adjoint(2, Vec{1, 2, 3}), dimension_error);
}

TEST(GridOperators, TwoByTwoHandExpansion) {
  const GridShape g{2, 2, 1};
  // column-major (a, b, c, d): columns (a, b) and (c, d)
  const Vec img{1.0, 3.0, 10.0, 16.0};
  EXPECT_EQ(make_dx(g)(img), (Vec{2.0, 0.0, 6.0, 0.0}));
  EXPECT_EQ(make_dy(g)(img), (Vec{9.0, 13.0, 0.0, 0.0}));
}

TEST(GridOperators, ConstantsInKernel) {
  const GridShape g{5, 4, 3};
  const Vec c(g.size(), 0.7);
  for (const auto& op : {make_dx(g), make_dy(g), make_d1(g), make_d2(g)}) {
    for (double v : op(c)) EXPECT_EQ(v, 0.0);
  }
}

TEST(GridOperators, ImpulseOnThreeByThree) {
  const GridShape g{3, 3, 1};
  Vec e(9, 0.0);
  e[g.index(1, 1)] = 1.0;
  const Vec d = make_d1(g)(e);
  Vec expect(18, 0.0);
  // vertical differences: rows 0 and 1 of column 1
  expect[g.index(0, 1)] = 1.0;
  expect[g.index(1, 1)] = -1.0;
  // horizontal differences: columns 0 and 1 of row 1
  expect[9 + g.index(1, 0)] = 1.0;
  expect[9 + g.index(1, 1)] = -1.0;
  EXPECT_EQ(d, expect);
}

TEST(GridOperators, SecondDifferenceKillsAffineAlongAxis) {
  const GridShape g{6, 5, 1};
  Vec ramp(g.size());
  for (std::size_t c = 0; c < g.cols; ++c)
    for (std::size_t r = 0; r < g.rows; ++r) ramp[g.index(r, c)] = 0.3 * static_cast<double>(r) + 1.0;
  const Vec d2 = make_d2(g)(ramp);
  // D_xx = Id (x) (-D^T D): interior rows of every column vanish; the first
  // and last rows see the boundary.
  for (std::size_t c = 0; c < g.cols; ++c)
    for (std::size_t r = 1; r + 1 < g.rows; ++r) EXPECT_NEAR(d2[g.index(r, c)], 0.0, 1e-14);
  // D_yy acts across columns, where the ramp is constant.
  for (std::size_t i = g.size(); i < 2 * g.size(); ++i) EXPECT_NEAR(d2[i], 0.0, 1e-14);
}

TEST(GridOperators, SecondOrderFactorsThroughLink) {
  std::mt19937_64 rng(7);
  const GridShape g{32, 32, 1};
  const LinearMap d1 = make_d1(g), d2 = make_d2(g), link = make_second_order_link(g);
  for (int k = 0; k < 5; ++k) {
    const Vec x = gaussian(rng, g.size());
    EXPECT_LE(test::max_abs_diff(d2(x), link(d1(x))), 1e-12);
  }
}

TEST(GridOperators, AdjointConsistency) {
  std::mt19937_64 rng(11);
  for (const GridShape& g : {GridShape{1, 1, 1}, GridShape{4, 9, 1}, GridShape{16, 16, 3}}) {
    for (const auto& op : {make_dx(g), make_dy(g), make_d1(g), make_d2(g), make_second_order_link(g)}) {
      for (int k = 0; k < 20; ++k) EXPECT_LE(adjoint_gap(op, rng), 1e-10) << op.name();
    }
  }
}

TEST(GridOperators, DimensionsAndBounds) {
  const GridShape g{4, 6, 1};
  EXPECT_EQ(make_d1(g).out_dim(), 48u);
  EXPECT_EQ(make_d2(g).in_dim(), 24u);
  EXPECT_DOUBLE_EQ(make_dx(g).norm_bound(), 2.0);
  EXPECT_DOUBLE_EQ(make_dy(g).norm_bound(), 2.0);
  EXPECT_DOUBLE_EQ(make_d1(g).norm_bound(), std::sqrt(8.0));
  EXPECT_DOUBLE_EQ(make_second_order_link(g).norm_bound(), 2.0);
}

// Dense singular values of the materialized operators never exceed the bounds.
TEST(GridOperators, BoundsDominateExactNorms) {
  const GridShape g{12, 12, 1};
  for (const auto& op : {make_dx(g), make_dy(g), make_d1(g), make_d2(g), make_second_order_link(g)}) {
    const double exact = Eigen::JacobiSVD<Eigen::MatrixXd>(materialize(op)).singularValues()(0);
    EXPECT_LE(exact, op.norm_bound() * (1.0 + 1e-12)) << op.name();
  }
}

TEST(PowerIteration, MatchesDenseEigenvalue) {
  const GridShape g{16, 16, 1};
  const LinearMap d1 = make_d1(g);
  const double est = power_iteration_norm(d1, 2000, 3);
  const double exact = Eigen::JacobiSVD<Eigen::MatrixXd>(materialize(d1)).singularValues()(0);
  EXPECT_GT(est, 2.6);
  EXPECT_LE(est, std::sqrt(8.0));
  EXPECT_LE(est * est, 8.0);
  EXPECT_NEAR(est, exact, 1e-3);
  EXPECT_LE(est, exact * (1.0 + 1e-12));
}

TEST(PowerIteration, SimpleMaps) {
  EXPECT_NEAR(power_iteration_norm(identity(5), 10, 1), 1.0, 1e-8);
  EXPECT_NEAR(power_iteration_norm(scale(3.0, identity(4)), 10, 9), 3.0, 1e-8);
  EXPECT_EQ(power_iteration_norm(scale(0.0, identity(3)), 10, 9), 0.0);
  EXPECT_EQ(power_iteration_norm(identity(5), 10, 4), power_iteration_norm(identity(5), 10, 4));
  EXPECT_THROW(power_iteration_norm(identity(2), 0, 1), parameter_error);
}

TEST(PowerIteration, NeverExceedsBound) {
  for (const GridShape& g : {GridShape{5, 7, 1}, GridShape{16, 16, 1}}) {
    for (const auto& op : {make_dx(g), make_dy(g), make_d1(g), make_d2(g), make_second_order_link(g)}) {
      EXPECT_LE(power_iteration_norm(op, 300, 5), op.norm_bound() * (1.0 + 1e-8)) << op.name();
    }
  }
}

TEST(Combinators, ComposeStackScale) {
  std::mt19937_64 rng(5);
  const LinearMap a = dense(3, 2, {1, 2, 3, 4, 5, 6});
  const LinearMap b = dense(2, 4, gaussian(rng, 8));
  const LinearMap ab = compose(a, b);
  EXPECT_EQ(ab.in_dim(), 4u);
  EXPECT_EQ(ab.out_dim(), 3u);
  EXPECT_NEAR(ab.norm_bound(), a.norm_bound() * b.norm_bound(), 1e-12);
  const Vec x = gaussian(rng, 4);
  EXPECT_LE(test::max_abs_diff(ab(x), a(b(x))), 1e-12);
  EXPECT_LE(test::max_abs_diff(compose(identity(2), b)(x), b(x)), 0.0);
  for (int k = 0; k < 20; ++k) EXPECT_LE(adjoint_gap(ab, rng), 1e-12);

  const LinearMap s = scale(-2.5, a);
  EXPECT_DOUBLE_EQ(s.norm_bound(), 2.5 * a.norm_bound());
  const LinearMap st = stack({a, s});
  EXPECT_EQ(st.out_dim(), 6u);
  EXPECT_NEAR(st.norm_bound(), std::hypot(a.norm_bound(), s.norm_bound()), 1e-12);
  for (int k = 0; k < 20; ++k) {
    EXPECT_LE(adjoint_gap(st, rng), 1e-12);
    EXPECT_LE(adjoint_gap(block_diagonal({a, b}), rng), 1e-12);
    EXPECT_LE(adjoint_gap(transpose(a), rng), 1e-12);
  }
  EXPECT_THROW(compose(b, a), dimension_error);
}

TEST(Combinators, Linearity) {
  std::mt19937_64 rng(2);
  const GridShape g{8, 8, 1};
  const LinearMap op = compose(make_second_order_link(g), make_d1(g));
  const Vec x = gaussian(rng, g.size()), w = gaussian(rng, g.size());
  Vec comb(g.size());
  for (std::size_t i = 0; i < comb.size(); ++i) comb[i] = 0.3 * x[i] - 1.7 * w[i];
  const Vec lhs = op(comb);
  const Vec ox = op(x), ow = op(w);
  for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], 0.3 * ox[i] - 1.7 * ow[i], 1e-12);
}

TEST(Combinators, BoundHoldsOnSamples) {
  std::mt19937_64 rng(3);
  const GridShape g{9, 7, 1};
  for (const auto& op : {make_d1(g), make_d2(g), compose(make_second_order_link(g), make_d1(g))}) {
    for (int k = 0; k < 20; ++k) {
      const Vec x = gaussian(rng, op.in_dim());
      EXPECT_LE(norm(op(x)), op.norm_bound() * norm(x) * (1.0 + 1e-12));
    }
  }
}

TEST(Counting, CountsForwardAndAdjoint) {
  auto ctr = std::make_shared<ApplicationCounter>();
  const LinearMap op = counted(identity(3), ctr);
  const Vec x{1, 2, 3};
  op(x);
  op(x);
  op.adjoint(x);
  EXPECT_EQ(ctr->forward.load(), 2u);
  EXPECT_EQ(ctr->adjoint.load(), 1u);
  EXPECT_EQ(ctr->total(), 3u);
  EXPECT_EQ(op(x), x);
}

TEST(GridShapeTest, LayoutAndValidation) {
  const GridShape g{3, 4, 3};
  EXPECT_EQ(g.size(), 36u);
  EXPECT_EQ(g.index(2, 1, 1), 12u + 3u + 2u);
  EXPECT_THROW((GridShape{0, 3, 1}.validate()), dimension_error);
  EXPECT_THROW((GridShape{3, 3, 2}.validate()), dimension_error);
  EXPECT_THROW(make_d1(GridShape{3, 3, 2}), dimension_error);
}

TEST(LinearMapTest, ApplyChecksLengths) {
  const LinearMap op = dense(2, 3, {1, 0, 0, 0, 1, 0});
  EXPECT_THROW(op(Vec{1, 2}), dimension_error);
  EXPECT_THROW(op.adjoint(Vec{1, 2, 3}), dimension_error);
}
