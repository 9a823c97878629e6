#include <benchmark/benchmark.h>

#include <random>

#include "pdsplit/imaging.hpp"
#include "pdsplit/solvers.hpp"

using namespace pdsplit;

namespace {

Vec random_vec(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Vec v(n);
  for (double& e : v) e = nd(rng);
  return v;
}

Image noisy_image(std::size_t side) {
  const Image clean = synthesize_test_image(TestImageKind::piecewise_affine, {side, side, 1}, 1);
  return add_gaussian_noise(clean, 0.08, 2);
}

void BM_D1Apply(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const LinearMap d1 = make_d1({side, side, 1});
  const Vec x = random_vec(d1.in_dim(), 1);
  Vec y(d1.out_dim());
  for (auto _ : state) {
    d1.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_D1Apply)->Arg(64)->Arg(256);

void BM_D2Adjoint(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const LinearMap d2 = make_d2({side, side, 1});
  const Vec y = random_vec(d2.out_dim(), 2);
  Vec x(d2.in_dim());
  for (auto _ : state) {
    d2.apply_adjoint(y, x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_D2Adjoint)->Arg(64)->Arg(256);

void BM_GroupNormProx(benchmark::State& state) {
  const bool uniform = state.range(0) != 0;
  GroupNormParams p{2, uniform ? Vec{1.0, 1.0} : Vec{0.4, 2.5}, 0.3};
  const Vec y = random_vec(2 * 65536, 3);
  Vec out(y.size());
  for (auto _ : state) {
    prox_group_norm(p, 0.7, y, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * 65536);
}
BENCHMARK(BM_GroupNormProx)->Arg(1)->Arg(0);

template <Method M>
void BM_Sweep(benchmark::State& state) {
  ModelConfig cfg;
  cfg.model = state.range(1) == 0 ? Model::ic : Model::mic;
  const ProblemSpec spec = build_problem(noisy_image(static_cast<std::size_t>(state.range(0))), cfg);
  SolverState cur = SolverState::zeros(spec), next = cur;
  const FbParams fb = default_fb_params(spec);
  const FbfParams fbf = default_fbf_params(spec);
  std::size_t n = 0;
  for (auto _ : state) {
    if constexpr (M == Method::fb) {
      fb_step(spec, cur, next, fb, n++);
    } else {
      fbf_step(spec, cur, next, fbf, n++);
    }
    std::swap(cur, next);
  }
}
BENCHMARK(BM_Sweep<Method::fb>)->Name("BM_FbStep")->Args({64, 0})->Args({64, 1})->Args({256, 0});
BENCHMARK(BM_Sweep<Method::fbf>)->Name("BM_FbfStep")->Args({64, 0})->Args({64, 1})->Args({256, 0});

}  // namespace

BENCHMARK_MAIN();
