#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdsplit/problem.hpp"

namespace pdsplit {

enum class Method { fb, fbf };

std::string to_string(Method m);

// n -> value. Used for relaxation parameters and FBF step sizes.
using Schedule = std::function<double(std::size_t)>;

Schedule constant_schedule(double value);

// Per-block step sizes of the forward-backward scheme.
struct BlockSteps {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double sigma = 0.0;
};

struct FbParams {
  double tau = 0.0;
  std::vector<BlockSteps> blocks;
  Schedule lambda = constant_schedule(1.0);
  double epsilon = 0.01;

  // Every step family set to `s` for all m blocks.
  static FbParams uniform(std::size_t m, double s, double lambda = 1.0);
};

// Outcome of checking
//   2 mu^{-1} (1 - alpha_bar) min_i {1/tau, 1/theta1_i, 1/theta2_i, 1/gamma1_i, 1/gamma2_i, 1/sigma_i} > 1
// with alpha_bar = max{ sqrt(tau sum_i sigma_i ||L_i||^2),
//                       max_j sqrt(theta1_j gamma1_j ||K_j||^2), max_j sqrt(theta2_j gamma2_j ||M_j||^2) }.
// When C = 0 the weaker requirement alpha_bar < 1 applies and relaxation
// parameters up to 2 - epsilon are admitted.
struct FbCertificate {
  double alpha_bar = 0.0;
  double rho = 0.0;  // (1 - alpha_bar) * min{...}
  bool relaxed = false;
  std::string quantity;  // name of the failing quantity, empty when ok
  std::optional<std::string> violation;

  bool ok() const { return !violation.has_value(); }
  double lambda_max(double epsilon) const { return relaxed ? 2.0 - epsilon : 1.0; }
};

FbCertificate certify_fb(const ProblemSpec& spec, const FbParams& params);

// All six step families share one value s chosen so that alpha_bar = 1/2,
// shrunk further until 2 rho / mu >= 1.01 when C is nonzero. lambda_n = 1.
FbParams default_fb_params(const ProblemSpec& spec);

struct FbfParams {
  double beta = 0.0;
  double epsilon = 0.0;
  Schedule gamma;
};

// beta = mu + sqrt(max{ sum_i ||L_i||^2, max_j max(||K_j||^2, ||M_j||^2) }).
double certify_fbf(const ProblemSpec& spec);

// Constant gamma_n = 0.99 (1 - eps) / beta with eps = 0.01 / (beta + 1).
FbfParams default_fbf_params(const ProblemSpec& spec);

// Throws parameter_error unless eps in (0, 1/(beta+1)) and gamma in [eps, (1-eps)/beta].
void check_fbf_step(const FbfParams& params, std::size_t n, double gamma);

// Quantities computed inexactly in the two schemes; an ErrorInjector may
// perturb each of them.
enum class Quantity {
  x_tilde,
  p_tilde,
  q_tilde,
  u1,
  u2,
  z_tilde,
  y_tilde,
  v_tilde,
  x_next,
  p_next,
  q_next,
  z_next,
  y_next,
  v_next,
};

inline constexpr std::size_t kQuantityCount = 14;

class ErrorInjector {
 public:
  virtual ~ErrorInjector() = default;
  // Adds e_n to `value`. `block` is 0 for the x quantities.
  virtual void perturb(Quantity what, std::size_t block, std::size_t n,
                       std::span<double> value) const = 0;
  // Upper bound on sum_n ||e_n|| for any single (quantity, block) stream.
  virtual double summability_bound() const = 0;
};

// e_n = magnitude / (n + 1)^2 times a unit vector drawn from a splitmix64
// stream keyed by (seed, quantity, block, n).
class DecayingErrorInjector final : public ErrorInjector {
 public:
  DecayingErrorInjector(double magnitude, std::uint64_t seed);
  void perturb(Quantity what, std::size_t block, std::size_t n,
               std::span<double> value) const override;
  double summability_bound() const override;

 private:
  double magnitude_;
  std::uint64_t seed_;
};

struct StepReport {
  // FB: ||state_n - state_{n+1}|| / lambda_n. FBF: ||state_n - tilde_n||.
  double residual = 0.0;
  // ||x_n - x~_n||^2
  double x_displacement_sq = 0.0;
};

// One sweep of the forward-backward scheme, including relaxation.
SolverState fb_step(const ProblemSpec& spec, const SolverState& state, const FbParams& params,
                    std::size_t n, const ErrorInjector* injector = nullptr);
StepReport fb_step(const ProblemSpec& spec, const SolverState& state, SolverState& next,
                   const FbParams& params, std::size_t n, const ErrorInjector* injector = nullptr);

// One sweep of the forward-backward-forward scheme.
SolverState fbf_step(const ProblemSpec& spec, const SolverState& state, const FbfParams& params,
                     std::size_t n, const ErrorInjector* injector = nullptr);
StepReport fbf_step(const ProblemSpec& spec, const SolverState& state, SolverState& next,
                    const FbfParams& params, std::size_t n,
                    const ErrorInjector* injector = nullptr);

struct TraceEntry {
  std::size_t iter = 0;  // 1-based count of completed sweeps
  double time_s = 0.0;   // wall clock since the solve started
  double residual = 0.0;
  std::optional<double> objective;
  std::optional<double> isnr;
  std::optional<double> x_displacement_sq;  // FBF only
};

struct MetricsTrace {
  std::vector<TraceEntry> entries;
};

enum class StopReason { converged, iteration_budget };

std::string to_string(StopReason r);

// Stop when residual <= tol, scaled by the first sweep's residual when
// `relative` is set, or after max_iters sweeps.
struct StopCriteria {
  std::size_t max_iters = 1000;
  double tol = 1e-8;
  bool relative = true;
};

struct SolveCallbacks {
  // Fills optional metrics of the entry for the state just produced.
  std::function<void(const SolverState&, TraceEntry&)> annotate;
  // Called once per sweep after annotate.
  std::function<void(const TraceEntry&)> observer;
};

struct SolveOptions {
  StopCriteria stop;
  const ErrorInjector* injector = nullptr;
  SolveCallbacks callbacks;
  std::optional<SolverState> initial;
};

struct SolveResult {
  SolverState state;
  MetricsTrace trace;
  StopReason reason = StopReason::iteration_budget;
  std::size_t iterations = 0;
};

// Divergence raised from inside solve(); carries the trace recorded so far.
class SolveDivergence : public numerical_divergence {
 public:
  SolveDivergence(const numerical_divergence& cause, MetricsTrace trace)
      : numerical_divergence(cause), trace_(std::move(trace)) {}
  const MetricsTrace& trace() const { return trace_; }

 private:
  MetricsTrace trace_;
};

// Throws parameter_error when certification fails.
SolveResult solve(const ProblemSpec& spec, const FbParams& params, const SolveOptions& options = {});
SolveResult solve(const ProblemSpec& spec, const FbfParams& params,
                  const SolveOptions& options = {});
// Uses the default parameters of the chosen method.
SolveResult solve(const ProblemSpec& spec, Method method, const SolveOptions& options = {});

}  // namespace pdsplit
