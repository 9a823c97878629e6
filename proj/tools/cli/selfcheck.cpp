#include "selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pdsplit/imaging.hpp"
#include "pdsplit/oracle.hpp"
#include "pdsplit/prox.hpp"
#include "pdsplit/random_instances.hpp"
#include "pdsplit/solvers.hpp"

namespace pdsplit::app {

namespace {

Vec random_vec(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Vec v(n);
  for (double& e : v) e = nd(rng);
  return v;
}

CheckRow row(std::string name, double err, double tol) {
  return {std::move(name), err, tol, err <= tol};
}

}  // namespace

double adjoint_mismatch(const LinearMap& op, std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const Vec x = random_vec(rng, op.in_dim());
    const Vec y = random_vec(rng, op.out_dim());
    const Vec ax = op(x);
    const double err = std::abs(dot(ax, y) - dot(x, op.adjoint(y)));
    worst = std::max(worst, err / (1.0 + norm(ax) * norm(y)));
  }
  return worst;
}

std::vector<CheckRow> run_self_checks(const SelfCheckOptions& opt) {
  std::vector<CheckRow> rows;
  std::mt19937_64 rng(opt.seed);

  // Adjoint consistency of the imaging operators.
  {
    const GridShape g{17, 23, 1};
    std::vector<std::pair<std::string, LinearMap>> ops = {
        {"D_x", make_dx(g)},          {"D_y", make_dy(g)},
        {"D1", make_d1(g)},           {"D2", make_d2(g)},
        {"second-order link", make_second_order_link(g)},
        {"D1 (color)", make_d1(GridShape{9, 7, 3})},
    };
    for (const auto& e : opt.extra_operators) ops.push_back(e);
    for (const auto& [name, op] : ops) {
      rows.push_back(row("adjoint " + name, adjoint_mismatch(op, opt.adjoint_pairs, rng()), 1e-10));
    }
  }

  // Moreau identity x = prox_{g f}(x) + g prox_{f^*/g}(x/g) together with the
  // Fenchel-Young equality f(u) + f^*(p) = <u, p> at the split point.
  {
    const std::size_t n = 6;
    std::vector<std::pair<std::string, ProximablePtr>> fs = {
        {"zero", std::make_shared<ZeroFunction>(n)},
        {"squared norm", std::make_shared<SquaredNorm>(n, 0.7)},
        {"quadratic fidelity", std::make_shared<QuadraticFidelity>(random_vec(rng, n))},
        {"group norm", std::make_shared<GroupNorm>(GroupNormParams{2, {1.0, 1.0}, 0.3}, n / 2)},
        {"weighted group norm",
         std::make_shared<GroupNorm>(GroupNormParams{3, {0.5, 2.0, 1.3}, 0.4}, n / 3)},
        {"box indicator", std::make_shared<BoxIndicator>(n, -0.5, 0.8)},
    };
    for (const auto& [name, f] : fs) {
      double worst = 0.0;
      for (double gamma : {1e-2, 1.0, 1e2}) {
        for (int k = 0; k < 20; ++k) {
          const Vec x = random_vec(rng, n, 2.0);
          const Vec u = f->prox(gamma, x);
          const Vec p = prox_conjugate(*f, 1.0 / gamma, [&] {
            Vec s = x;
            for (double& e : s) e /= gamma;
            return s;
          }());
          double split = 0.0;
          for (std::size_t i = 0; i < n; ++i) {
            split = std::max(split, std::abs(x[i] - u[i] - gamma * p[i]));
          }
          const double fy = f->value(u) + f->conjugate_value(p) - dot(u, p);
          const double scale = 1.0 + norm(u) * norm(p);
          worst = std::max({worst, split / (1.0 + norm(x)), std::abs(fy) / scale});
        }
      }
      rows.push_back(row("moreau " + name, worst, 1e-10));
    }
  }

  // Prox against direct numerical minimization in dimension 2.
  {
    double worst = 0.0;
    const GroupNormParams gp{2, {0.6, 1.7}, 0.5};
    for (int k = 0; k < 10; ++k) {
      const Vec x = random_vec(rng, 2, 1.5);
      const double gamma = std::exp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng));
      const Vec fast = prox_group_norm(gp, gamma, x);
      const Vec slow = oracle::prox_by_minimization(
          [&](std::span<const double> y) {
            return gp.alpha * std::sqrt(gp.weights[0] * y[0] * y[0] + gp.weights[1] * y[1] * y[1]);
          },
          gamma, x);
      worst = std::max(worst, distance(fast, slow));
    }
    rows.push_back(row("prox vs oracle (weighted group norm)", worst, 1e-6));
  }

  // Fixed-point invariance at solutions found by long runs.
  {
    double worst_fb = 0.0;
    double worst_fbf = 0.0;
    for (std::uint64_t k = 0; k < 3; ++k) {
      const ProblemSpec spec = testing::random_instance(opt.seed + k);
      SolveOptions so;
      so.stop.max_iters = 200000;
      so.stop.tol = 1e-15;
      so.stop.relative = false;
      const FbfParams fbf = default_fbf_params(spec);
      const SolveResult sol = solve(spec, fbf, so);
      worst_fb = std::max(worst_fb,
                          fb_step(spec, sol.state, default_fb_params(spec), 0).distance(sol.state));
      worst_fbf = std::max(worst_fbf, fbf_step(spec, sol.state, fbf, 0).distance(sol.state));
    }
    rows.push_back(row("fixed point (forward-backward)", worst_fb, 1e-10));
    rows.push_back(row("fixed point (forward-backward-forward)", worst_fbf, 1e-10));
  }
  return rows;
}

}  // namespace pdsplit::app
