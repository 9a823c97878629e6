#include "pdsplit/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace pdsplit {

std::string to_string(Method m) { return m == Method::fb ? "fb" : "fbf"; }

std::string to_string(StopReason r) {
  return r == StopReason::converged ? "converged" : "iteration budget";
}

Schedule constant_schedule(double value) {
  return [value](std::size_t) { return value; };
}

FbParams FbParams::uniform(std::size_t m, double s, double lambda) {
  FbParams p;
  p.tau = s;
  p.blocks.assign(m, BlockSteps{s, s, s, s, s});
  p.lambda = constant_schedule(lambda);
  return p;
}

// ---------------------------------------------------------------------------
// Step-size certification

namespace {

bool positive(double v) { return v > 0.0 && std::isfinite(v); }

double sq(double v) { return v * v; }

// sqrt(max{sum_i ||L_i||^2, max_j ||K_j||^2, max_j ||M_j||^2})
double operator_scale(const ProblemSpec& spec) {
  double sum_l = 0.0;
  double km = 0.0;
  for (const auto& b : spec.blocks) {
    sum_l += sq(b.L.norm_bound());
    km = std::max({km, sq(b.K.norm_bound()), sq(b.M.norm_bound())});
  }
  return std::sqrt(std::max(sum_l, km));
}

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

FbCertificate certify_fb(const ProblemSpec& spec, const FbParams& params) {
  FbCertificate cert;
  auto fail = [&](std::string quantity, std::string msg) {
    cert.quantity = std::move(quantity);
    cert.violation = std::move(msg);
    return cert;
  };

  if (params.blocks.size() != spec.blocks.size()) {
    return fail("blocks", "step sizes given for " + std::to_string(params.blocks.size()) +
                              " blocks, problem has " + std::to_string(spec.blocks.size()));
  }
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0)) {
    return fail("epsilon", "epsilon must lie in (0, 1)");
  }
  if (!params.lambda) return fail("lambda", "relaxation schedule is empty");
  if (!positive(params.tau)) return fail("tau", "tau must be strictly positive");
  for (std::size_t i = 0; i < params.blocks.size(); ++i) {
    const auto& s = params.blocks[i];
    const std::string tag = " (block " + std::to_string(i) + ")";
    if (!positive(s.theta1)) return fail("theta1", "theta1 must be strictly positive" + tag);
    if (!positive(s.theta2)) return fail("theta2", "theta2 must be strictly positive" + tag);
    if (!positive(s.gamma1)) return fail("gamma1", "gamma1 must be strictly positive" + tag);
    if (!positive(s.gamma2)) return fail("gamma2", "gamma2 must be strictly positive" + tag);
    if (!positive(s.sigma)) return fail("sigma", "sigma must be strictly positive" + tag);
  }

  const bool c_zero = spec.C->is_zero();
  if (!c_zero && !spec.C->cocoercive()) {
    return fail("C", "C is only Lipschitz, not cocoercive; the forward-backward scheme needs a "
                     "cocoercive C (use the forward-backward-forward scheme)");
  }

  double sum_sigma_l = 0.0;
  double min_inv = 1.0 / params.tau;
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const auto& s = params.blocks[i];
    sum_sigma_l += s.sigma * sq(spec.blocks[i].L.norm_bound());
    min_inv = std::min({min_inv, 1.0 / s.theta1, 1.0 / s.theta2, 1.0 / s.gamma1, 1.0 / s.gamma2,
                        1.0 / s.sigma});
  }

  // Track which product attains alpha_bar so a violation can name it.
  double worst = params.tau * sum_sigma_l;
  std::string worst_name = "tau*sum(sigma_i*||L_i||^2)";
  for (std::size_t j = 0; j < spec.blocks.size(); ++j) {
    const auto& s = params.blocks[j];
    const double pk = s.theta1 * s.gamma1 * sq(spec.blocks[j].K.norm_bound());
    const double pm = s.theta2 * s.gamma2 * sq(spec.blocks[j].M.norm_bound());
    if (pk > worst) {
      worst = pk;
      worst_name = "theta1*gamma1*||K||^2 (block " + std::to_string(j) + ")";
    }
    if (pm > worst) {
      worst = pm;
      worst_name = "theta2*gamma2*||M||^2 (block " + std::to_string(j) + ")";
    }
  }
  cert.alpha_bar = std::sqrt(worst);
  cert.rho = (1.0 - cert.alpha_bar) * min_inv;
  cert.relaxed = c_zero;

  if (cert.alpha_bar >= 1.0) {
    return fail(worst_name, "alpha_bar = " + fmt_num(cert.alpha_bar) + " >= 1 because " +
                                worst_name + " = " + fmt_num(worst) + " >= 1");
  }
  if (!c_zero) {
    const double lhs = 2.0 * cert.rho / spec.mu();
    if (!(lhs > 1.0)) {
      return fail("step condition",
                  "2/mu*(1-alpha_bar)*min{1/tau,1/theta1,1/theta2,1/gamma1,1/gamma2,1/sigma} = " +
                      fmt_num(lhs) + " <= 1 (alpha_bar = " + fmt_num(cert.alpha_bar) +
                      ", mu = " + fmt_num(spec.mu()) + ")");
    }
  }
  return cert;
}

FbParams default_fb_params(const ProblemSpec& spec) {
  const double scale = operator_scale(spec);
  // With a common value s, alpha_bar = s * scale and rho = (1 - alpha_bar) / s.
  double s = 0.5 / scale;
  if (!spec.C->is_zero()) {
    // 2 (1 - s scale) / (s mu) >= 1.01  <=>  s <= 2 / (2 scale + 1.01 mu)
    s = std::min(s, 2.0 / (2.0 * scale + 1.01 * spec.mu()));
  }
  return FbParams::uniform(spec.blocks.size(), s, 1.0);
}

double certify_fbf(const ProblemSpec& spec) {
  const double mu = spec.mu();
  if (!positive(mu)) throw parameter_error("mu must be strictly positive");
  return mu + operator_scale(spec);
}

FbfParams default_fbf_params(const ProblemSpec& spec) {
  FbfParams p;
  p.beta = certify_fbf(spec);
  p.epsilon = 0.01 / (p.beta + 1.0);
  p.gamma = constant_schedule(0.99 * (1.0 - p.epsilon) / p.beta);
  return p;
}

void check_fbf_step(const FbfParams& params, std::size_t n, double gamma) {
  if (!positive(params.beta)) throw parameter_error("beta must be strictly positive");
  if (!(params.epsilon > 0.0 && params.epsilon < 1.0 / (params.beta + 1.0))) {
    throw parameter_error("epsilon = " + fmt_num(params.epsilon) + " outside (0, 1/(beta+1))");
  }
  const double hi = (1.0 - params.epsilon) / params.beta;
  if (!(gamma >= params.epsilon && gamma <= hi)) {
    throw parameter_error("gamma_" + std::to_string(n) + " = " + fmt_num(gamma) + " outside [" +
                          fmt_num(params.epsilon) + ", " + fmt_num(hi) + "]");
  }
}

// ---------------------------------------------------------------------------
// Error injection

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

DecayingErrorInjector::DecayingErrorInjector(double magnitude, std::uint64_t seed)
    : magnitude_(magnitude), seed_(seed) {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw parameter_error("error magnitude must be finite and nonnegative");
  }
}

void DecayingErrorInjector::perturb(Quantity what, std::size_t block, std::size_t n,
                                    std::span<double> value) const {
  if (magnitude_ == 0.0 || value.empty()) return;
  std::uint64_t state = seed_;
  state ^= splitmix64(state) + static_cast<std::uint64_t>(what) * 0x100000001b3ULL;
  state ^= splitmix64(state) + block * 0xc2b2ae3d27d4eb4fULL;
  state ^= splitmix64(state) + n;
  Vec dir(value.size());
  for (double& d : dir) {
    d = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  const double nd = norm(dir);
  if (nd == 0.0) return;
  const double np1 = static_cast<double>(n + 1);
  const double scale = magnitude_ / (np1 * np1) / nd;
  for (std::size_t i = 0; i < value.size(); ++i) value[i] += scale * dir[i];
}

double DecayingErrorInjector::summability_bound() const {
  return magnitude_ * std::numbers::pi * std::numbers::pi / 6.0;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

void inject(const ErrorInjector* inj, Quantity q, std::size_t block, std::size_t n,
            std::span<double> v) {
  if (inj != nullptr) inj->perturb(q, block, n, v);
}

void require_finite(std::span<const double> v, std::size_t n, const char* what) {
  if (!all_finite(v)) throw numerical_divergence(n, std::string("non-finite value in ") + what);
}

void prepare_like(const SolverState& s, SolverState& out) {
  out.x.resize(s.x.size());
  out.blocks.resize(s.blocks.size());
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    out.blocks[i].p.resize(s.blocks[i].p.size());
    out.blocks[i].q.resize(s.blocks[i].q.size());
    out.blocks[i].z.resize(s.blocks[i].z.size());
    out.blocks[i].y.resize(s.blocks[i].y.size());
    out.blocks[i].v.resize(s.blocks[i].v.size());
  }
}

void require_state(const ProblemSpec& spec, const SolverState& s) {
  const auto diag = validate_state(spec, s);
  if (!diag.empty()) throw dimension_error("invalid solver state: " + diag.front());
}

// x~ = J_{step A}(x - step (C x + sum_i L_i^* v_i - z)); also returns C x and
// sum_i L_i^* v_i in the given buffers (blocks summed in index order).
void backward_x(const ProblemSpec& spec, const SolverState& s, double step, Vec& cx, Vec& sum_lv,
                Vec& x_tilde) {
  const std::size_t n = spec.n;
  spec.C->apply(s.x, cx);
  std::fill(sum_lv.begin(), sum_lv.end(), 0.0);
  Vec tmp(n);
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    spec.blocks[i].L.apply_adjoint(s.blocks[i].v, tmp);
    for (std::size_t j = 0; j < n; ++j) sum_lv[j] += tmp[j];
  }
  for (std::size_t j = 0; j < n; ++j) x_tilde[j] = s.x[j] - step * (cx[j] + sum_lv[j] - spec.z[j]);
  spec.A->prox(step, x_tilde, x_tilde);
}

}  // namespace

StepReport fb_step(const ProblemSpec& spec, const SolverState& s, SolverState& next,
                   const FbParams& params, std::size_t n, const ErrorInjector* injector) {
  require_state(spec, s);
  const auto cert = certify_fb(spec, params);
  if (!cert.ok()) throw parameter_error("fb_step: " + *cert.violation);
  const double lambda = params.lambda(n);
  if (!(lambda >= params.epsilon && lambda <= cert.lambda_max(params.epsilon))) {
    throw parameter_error("fb_step: lambda_" + std::to_string(n) + " = " + fmt_num(lambda) +
                          " outside [" + fmt_num(params.epsilon) + ", " +
                          fmt_num(cert.lambda_max(params.epsilon)) + "]");
  }

  const std::size_t dim = spec.n;
  const double tau = params.tau;
  Vec cx(dim), sum_lv(dim), xt(dim);
  backward_x(spec, s, tau, cx, sum_lv, xt);
  inject(injector, Quantity::x_tilde, 0, n, xt);
  require_finite(xt, n, "x~");

  // 2 x~ - x, shared by every block
  Vec extrap(dim);
  for (std::size_t j = 0; j < dim; ++j) extrap[j] = 2.0 * xt[j] - s.x[j];

  SolverState tilde;
  prepare_like(s, tilde);
  tilde.x = xt;

  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const Block& b = spec.blocks[i];
    const BlockSteps& st = params.blocks[i];
    const BlockState& cur = s.blocks[i];
    BlockState& t = tilde.blocks[i];
    const std::size_t g = b.L.out_dim();

    // p~ = J_{theta1 B^{-1}}(p + theta1 K z)
    Vec kz = b.K(cur.z);
    for (std::size_t j = 0; j < kz.size(); ++j) kz[j] = cur.p[j] + st.theta1 * kz[j];
    resolvent_of_inverse(*b.B, st.theta1, kz, t.p);
    inject(injector, Quantity::p_tilde, i, n, t.p);

    // q~ = J_{theta2 D^{-1}}(q + theta2 M y)
    Vec my = b.M(cur.y);
    for (std::size_t j = 0; j < my.size(); ++j) my[j] = cur.q[j] + st.theta2 * my[j];
    resolvent_of_inverse(*b.D, st.theta2, my, t.q);
    inject(injector, Quantity::q_tilde, i, n, t.q);

    // L(2 x~ - x) - r, evaluated once per block
    Vec d = b.L(extrap);
    for (std::size_t j = 0; j < g; ++j) d[j] -= b.r[j];

    Vec pp(t.p.size());
    for (std::size_t j = 0; j < pp.size(); ++j) pp[j] = cur.p[j] - 2.0 * t.p[j];
    Vec u1 = b.K.adjoint(pp);
    for (std::size_t j = 0; j < g; ++j) {
      u1[j] = cur.z[j] + st.gamma1 * (u1[j] + cur.v[j] + st.sigma * d[j]);
    }
    inject(injector, Quantity::u1, i, n, u1);

    Vec qq(t.q.size());
    for (std::size_t j = 0; j < qq.size(); ++j) qq[j] = cur.q[j] - 2.0 * t.q[j];
    Vec u2 = b.M.adjoint(qq);
    for (std::size_t j = 0; j < g; ++j) {
      u2[j] = cur.y[j] + st.gamma2 * (u2[j] + cur.v[j] + st.sigma * d[j]);
    }
    inject(injector, Quantity::u2, i, n, u2);

    const double sg1 = st.sigma * st.gamma1;
    const double sg2 = st.sigma * st.gamma2;
    const double cz = (1.0 + sg2) / (1.0 + sg1 + sg2);
    const double cu = sg1 / (1.0 + sg2);
    for (std::size_t j = 0; j < g; ++j) t.z[j] = cz * (u1[j] - cu * u2[j]);
    inject(injector, Quantity::z_tilde, i, n, t.z);
    for (std::size_t j = 0; j < g; ++j) t.y[j] = (u2[j] - sg2 * t.z[j]) / (1.0 + sg2);
    inject(injector, Quantity::y_tilde, i, n, t.y);
    for (std::size_t j = 0; j < g; ++j) {
      t.v[j] = cur.v[j] + st.sigma * (d[j] - t.z[j] - t.y[j]);
    }
    inject(injector, Quantity::v_tilde, i, n, t.v);
  }

  // w_{n+1} = w_n + lambda (w~ - w_n) for every variable
  prepare_like(s, next);
  auto relax = [lambda](const Vec& w, const Vec& wt, Vec& out) {
    for (std::size_t j = 0; j < w.size(); ++j) out[j] = w[j] + lambda * (wt[j] - w[j]);
  };
  relax(s.x, tilde.x, next.x);
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    relax(s.blocks[i].p, tilde.blocks[i].p, next.blocks[i].p);
    relax(s.blocks[i].q, tilde.blocks[i].q, next.blocks[i].q);
    relax(s.blocks[i].z, tilde.blocks[i].z, next.blocks[i].z);
    relax(s.blocks[i].y, tilde.blocks[i].y, next.blocks[i].y);
    relax(s.blocks[i].v, tilde.blocks[i].v, next.blocks[i].v);
  }
  if (!next.finite()) throw numerical_divergence(n, "non-finite value in forward-backward state");

  StepReport rep;
  rep.residual = s.distance(next) / lambda;
  rep.x_displacement_sq = squared_distance(s.x, tilde.x);
  return rep;
}

SolverState fb_step(const ProblemSpec& spec, const SolverState& state, const FbParams& params,
                    std::size_t n, const ErrorInjector* injector) {
  SolverState next;
  fb_step(spec, state, next, params, n, injector);
  return next;
}

StepReport fbf_step(const ProblemSpec& spec, const SolverState& s, SolverState& next,
                    const FbfParams& params, std::size_t n, const ErrorInjector* injector) {
  require_state(spec, s);
  if (!params.gamma) throw parameter_error("fbf_step: step schedule is empty");
  const double gam = params.gamma(n);
  check_fbf_step(params, n, gam);

  const std::size_t dim = spec.n;
  Vec cx(dim), sum_lv(dim), xt(dim);
  backward_x(spec, s, gam, cx, sum_lv, xt);
  inject(injector, Quantity::x_tilde, 0, n, xt);
  require_finite(xt, n, "x~");

  SolverState tilde;
  prepare_like(s, tilde);
  tilde.x = xt;

  const double g2 = gam * gam;
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const Block& b = spec.blocks[i];
    const BlockState& cur = s.blocks[i];
    BlockState& t = tilde.blocks[i];
    const std::size_t g = b.L.out_dim();

    Vec kz = b.K(cur.z);
    for (std::size_t j = 0; j < kz.size(); ++j) kz[j] = cur.p[j] + gam * kz[j];
    resolvent_of_inverse(*b.B, gam, kz, t.p);
    inject(injector, Quantity::p_tilde, i, n, t.p);

    Vec my = b.M(cur.y);
    for (std::size_t j = 0; j < my.size(); ++j) my[j] = cur.q[j] + gam * my[j];
    resolvent_of_inverse(*b.D, gam, my, t.q);
    inject(injector, Quantity::q_tilde, i, n, t.q);

    // L x - r
    Vec d = b.L(s.x);
    for (std::size_t j = 0; j < g; ++j) d[j] -= b.r[j];

    Vec u1 = b.K.adjoint(cur.p);
    for (std::size_t j = 0; j < g; ++j) u1[j] = cur.z[j] - gam * (u1[j] - cur.v[j] - gam * d[j]);
    inject(injector, Quantity::u1, i, n, u1);

    Vec u2 = b.M.adjoint(cur.q);
    for (std::size_t j = 0; j < g; ++j) u2[j] = cur.y[j] - gam * (u2[j] - cur.v[j] - gam * d[j]);
    inject(injector, Quantity::u2, i, n, u2);

    const double cz = (1.0 + g2) / (1.0 + 2.0 * g2);
    const double cu = g2 / (1.0 + g2);
    for (std::size_t j = 0; j < g; ++j) t.z[j] = cz * (u1[j] - cu * u2[j]);
    inject(injector, Quantity::z_tilde, i, n, t.z);
    for (std::size_t j = 0; j < g; ++j) t.y[j] = (u2[j] - g2 * t.z[j]) / (1.0 + g2);
    inject(injector, Quantity::y_tilde, i, n, t.y);
    for (std::size_t j = 0; j < g; ++j) t.v[j] = cur.v[j] + gam * (d[j] - t.z[j] - t.y[j]);
    inject(injector, Quantity::v_tilde, i, n, t.v);
  }

  // Second forward pass.
  prepare_like(s, next);
  {
    Vec cxt(dim);
    spec.C->apply(xt, cxt);
    Vec corr(dim, 0.0), tmp(dim);
    for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
      const auto& cur = s.blocks[i];
      const auto& t = tilde.blocks[i];
      Vec dv(cur.v.size());
      for (std::size_t j = 0; j < dv.size(); ++j) dv[j] = cur.v[j] - t.v[j];
      spec.blocks[i].L.apply_adjoint(dv, tmp);
      for (std::size_t j = 0; j < dim; ++j) corr[j] += tmp[j];
    }
    for (std::size_t j = 0; j < dim; ++j) {
      next.x[j] = xt[j] + gam * (cx[j] - cxt[j] + corr[j]);
    }
    inject(injector, Quantity::x_next, 0, n, next.x);
  }

  Vec dx(dim);
  for (std::size_t j = 0; j < dim; ++j) dx[j] = s.x[j] - xt[j];

  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const Block& b = spec.blocks[i];
    const BlockState& cur = s.blocks[i];
    const BlockState& t = tilde.blocks[i];
    BlockState& nx = next.blocks[i];

    auto diff = [](const Vec& a, const Vec& c) {
      Vec out(a.size());
      for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] - c[j];
      return out;
    };

    const Vec kdz = b.K(diff(cur.z, t.z));
    for (std::size_t j = 0; j < nx.p.size(); ++j) nx.p[j] = t.p[j] - gam * kdz[j];
    inject(injector, Quantity::p_next, i, n, nx.p);

    const Vec mdy = b.M(diff(cur.y, t.y));
    for (std::size_t j = 0; j < nx.q.size(); ++j) nx.q[j] = t.q[j] - gam * mdy[j];
    inject(injector, Quantity::q_next, i, n, nx.q);

    const Vec kdp = b.K.adjoint(diff(cur.p, t.p));
    for (std::size_t j = 0; j < nx.z.size(); ++j) nx.z[j] = t.z[j] + gam * kdp[j];
    inject(injector, Quantity::z_next, i, n, nx.z);

    const Vec mdq = b.M.adjoint(diff(cur.q, t.q));
    for (std::size_t j = 0; j < nx.y.size(); ++j) nx.y[j] = t.y[j] + gam * mdq[j];
    inject(injector, Quantity::y_next, i, n, nx.y);

    const Vec ldx = b.L(dx);
    for (std::size_t j = 0; j < nx.v.size(); ++j) nx.v[j] = t.v[j] - gam * ldx[j];
    inject(injector, Quantity::v_next, i, n, nx.v);
  }
  if (!next.finite()) {
    throw numerical_divergence(n, "non-finite value in forward-backward-forward state");
  }

  StepReport rep;
  rep.residual = s.distance(tilde);
  rep.x_displacement_sq = squared_distance(s.x, xt);
  return rep;
}

SolverState fbf_step(const ProblemSpec& spec, const SolverState& state, const FbfParams& params,
                     std::size_t n, const ErrorInjector* injector) {
  SolverState next;
  fbf_step(spec, state, next, params, n, injector);
  return next;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

template <typename Step>
SolveResult run(const ProblemSpec& spec, const SolveOptions& opt, bool fbf, Step&& step) {
  SolveResult res;
  res.state = opt.initial ? *opt.initial : SolverState::zeros(spec);
  require_state(spec, res.state);
  if (opt.stop.max_iters == 0) return res;

  const auto t0 = std::chrono::steady_clock::now();
  SolverState next;
  double threshold = opt.stop.tol;
  for (std::size_t n = 0; n < opt.stop.max_iters; ++n) {
    StepReport rep;
    try {
      rep = step(res.state, next, n);
    } catch (const numerical_divergence& e) {
      throw SolveDivergence(e, std::move(res.trace));
    }
    if (!std::isfinite(rep.residual)) {
      throw SolveDivergence(numerical_divergence(n, "non-finite fixed-point residual"),
                            std::move(res.trace));
    }
    std::swap(res.state, next);
    res.iterations = n + 1;

    TraceEntry e;
    e.iter = n + 1;
    e.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    e.residual = rep.residual;
    if (fbf) e.x_displacement_sq = rep.x_displacement_sq;
    if (opt.callbacks.annotate) opt.callbacks.annotate(res.state, e);
    if (opt.callbacks.observer) opt.callbacks.observer(e);
    res.trace.entries.push_back(e);

    if (n == 0 && opt.stop.relative) threshold = opt.stop.tol * rep.residual;
    if (rep.residual <= threshold) {
      res.reason = StopReason::converged;
      return res;
    }
  }
  res.reason = StopReason::iteration_budget;
  return res;
}

}  // namespace

SolveResult solve(const ProblemSpec& spec, const FbParams& params, const SolveOptions& options) {
  require_valid(spec);
  const auto cert = certify_fb(spec, params);
  if (!cert.ok()) throw parameter_error("forward-backward step sizes rejected: " + *cert.violation);
  return run(spec, options, false, [&](const SolverState& s, SolverState& next, std::size_t n) {
    return fb_step(spec, s, next, params, n, options.injector);
  });
}

SolveResult solve(const ProblemSpec& spec, const FbfParams& params, const SolveOptions& options) {
  require_valid(spec);
  certify_fbf(spec);
  return run(spec, options, true, [&](const SolverState& s, SolverState& next, std::size_t n) {
    return fbf_step(spec, s, next, params, n, options.injector);
  });
}

SolveResult solve(const ProblemSpec& spec, Method method, const SolveOptions& options) {
  if (method == Method::fb) return solve(spec, default_fb_params(spec), options);
  return solve(spec, default_fbf_params(spec), options);
}

}  // namespace pdsplit
