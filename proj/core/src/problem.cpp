#include "pdsplit/problem.hpp"

#include <algorithm>
#include <cmath>

#include "pdsplit/solvers.hpp"

namespace pdsplit {

SolverState SolverState::zeros(const ProblemSpec& spec) {
  SolverState s;
  s.x.assign(spec.n, 0.0);
  s.blocks.reserve(spec.blocks.size());
  for (const auto& b : spec.blocks) {
    BlockState bs;
    bs.p.assign(b.K.out_dim(), 0.0);
    bs.q.assign(b.M.out_dim(), 0.0);
    bs.z.assign(b.L.out_dim(), 0.0);
    bs.y.assign(b.L.out_dim(), 0.0);
    bs.v.assign(b.L.out_dim(), 0.0);
    s.blocks.push_back(std::move(bs));
  }
  return s;
}

double SolverState::squared_distance(const SolverState& o) const {
  if (blocks.size() != o.blocks.size()) throw dimension_error("state: block count differs");
  double s = pdsplit::squared_distance(x, o.x);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& a = blocks[i];
    const auto& b = o.blocks[i];
    s += pdsplit::squared_distance(a.p, b.p) + pdsplit::squared_distance(a.q, b.q) +
         pdsplit::squared_distance(a.z, b.z) + pdsplit::squared_distance(a.y, b.y) +
         pdsplit::squared_distance(a.v, b.v);
  }
  return s;
}

double SolverState::distance(const SolverState& o) const { return std::sqrt(squared_distance(o)); }

bool SolverState::finite() const {
  if (!all_finite(x)) return false;
  return std::all_of(blocks.begin(), blocks.end(), [](const BlockState& b) {
    return all_finite(b.p) && all_finite(b.q) && all_finite(b.z) && all_finite(b.y) &&
           all_finite(b.v);
  });
}

std::vector<std::string> validate_problem(const ProblemSpec& spec) {
  std::vector<std::string> diag;
  auto add = [&](std::string msg) { diag.push_back(std::move(msg)); };

  if (spec.n == 0) add("problem dimension n must be positive");
  if (spec.z.size() != spec.n) {
    add("z has length " + std::to_string(spec.z.size()) + ", expected n = " + std::to_string(spec.n));
  }
  if (!spec.A) {
    add("operator A is missing");
  } else if (spec.A->dim() != spec.n) {
    add("A acts on dimension " + std::to_string(spec.A->dim()) + ", expected n");
  }
  if (!spec.C) {
    add("operator C is missing");
  } else {
    if (spec.C->dim() != spec.n) add("C acts on dimension " + std::to_string(spec.C->dim()) + ", expected n");
    if (!(spec.C->lipschitz() > 0.0) || !std::isfinite(spec.C->lipschitz())) {
      add("mu must be a positive finite number");
    }
    if (spec.C->is_zero() && spec.C->dim() == spec.n && spec.n > 0) {
      Vec probe(spec.n, 1.0), out(spec.n);
      spec.C->apply(probe, out);
      if (norm(out) != 0.0) add("C is flagged zero but C(1) != 0");
    }
  }
  if (spec.blocks.empty()) add("at least one block (m >= 1) is required");

  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const auto& b = spec.blocks[i];
    const std::string tag = "block " + std::to_string(i) + ": ";
    if (b.L.in_dim() != spec.n) {
      add(tag + "L.in = " + std::to_string(b.L.in_dim()) + " != n = " + std::to_string(spec.n));
    }
    if (b.K.in_dim() != b.L.out_dim()) {
      add(tag + "K.in = " + std::to_string(b.K.in_dim()) + " != L.out = " + std::to_string(b.L.out_dim()));
    }
    if (b.M.in_dim() != b.L.out_dim()) {
      add(tag + "M.in = " + std::to_string(b.M.in_dim()) + " != L.out = " + std::to_string(b.L.out_dim()));
    }
    if (b.r.size() != b.L.out_dim()) {
      add(tag + "len(r) = " + std::to_string(b.r.size()) + " != L.out = " + std::to_string(b.L.out_dim()));
    }
    if (!b.B) {
      add(tag + "B is missing");
    } else if (b.B->dim() != b.K.out_dim()) {
      add(tag + "B acts on dimension " + std::to_string(b.B->dim()) + " != K.out = " +
          std::to_string(b.K.out_dim()));
    }
    if (!b.D) {
      add(tag + "D is missing");
    } else if (b.D->dim() != b.M.out_dim()) {
      add(tag + "D acts on dimension " + std::to_string(b.D->dim()) + " != M.out = " +
          std::to_string(b.M.out_dim()));
    }
    if (!(b.L.norm_bound() > 0.0)) add(tag + "L must be nonzero");
    if (!(b.K.norm_bound() > 0.0)) add(tag + "K must be nonzero");
    if (!(b.M.norm_bound() > 0.0)) add(tag + "M must be nonzero");
  }
  return diag;
}

void require_valid(const ProblemSpec& spec) {
  const auto diag = validate_problem(spec);
  if (diag.empty()) return;
  std::string msg = "invalid problem:";
  for (const auto& d : diag) msg += "\n  " + d;
  throw dimension_error(msg);
}

std::vector<std::string> validate_state(const ProblemSpec& spec, const SolverState& s) {
  std::vector<std::string> diag;
  if (s.x.size() != spec.n) diag.push_back("x has wrong length");
  if (s.blocks.size() != spec.blocks.size()) {
    diag.push_back("state has " + std::to_string(s.blocks.size()) + " blocks, problem has " +
                   std::to_string(spec.blocks.size()));
    return diag;
  }
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    const auto& b = spec.blocks[i];
    const auto& st = s.blocks[i];
    const std::string tag = "block " + std::to_string(i) + ": ";
    if (st.p.size() != b.K.out_dim()) diag.push_back(tag + "p has wrong length");
    if (st.q.size() != b.M.out_dim()) diag.push_back(tag + "q has wrong length");
    const std::size_t g = b.L.out_dim();
    if (st.z.size() != g || st.y.size() != g || st.v.size() != g) {
      diag.push_back(tag + "z, y, v must have length L.out");
    }
  }
  if (diag.empty() && !s.finite()) diag.push_back("state has non-finite entries");
  return diag;
}

double optimality_residual(const ProblemSpec& spec, const SolverState& state,
                           const FbParams& params) {
  const auto cert = certify_fb(spec, params);
  if (!cert.ok()) throw parameter_error("optimality_residual: " + *cert.violation);
  FbParams undamped = params;
  undamped.lambda = [](std::size_t) { return 1.0; };
  const SolverState next = fb_step(spec, state, undamped, 0, nullptr);
  return next.distance(state);
}

double evaluate_primal_objective(const ProblemSpec& spec, std::span<const double> x,
                                 std::span<const Vec> y) {
  require_same_size(spec.n, x.size(), "primal objective x");
  require_same_size(spec.blocks.size(), y.size(), "primal objective certificates");
  double total = spec.A->value(x) + spec.C->value(x) - dot(x, spec.z);
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const auto& b = spec.blocks[i];
    Vec u = b.L(x);
    require_same_size(u.size(), y[i].size(), "primal objective y_i");
    for (std::size_t j = 0; j < u.size(); ++j) u[j] -= b.r[j] + y[i][j];
    total += b.B->value(b.K(u)) + b.D->value(b.M(y[i]));
  }
  return total;
}

DualValue evaluate_dual_objective(const ProblemSpec& spec, std::span<const Vec> p,
                                  std::span<const Vec> q, double feas_tol) {
  require_same_size(spec.blocks.size(), p.size(), "dual objective p");
  require_same_size(spec.blocks.size(), q.size(), "dual objective q");

  DualValue out;
  Vec w = spec.z;
  double tail = 0.0;
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const auto& b = spec.blocks[i];
    const Vec kp = b.K.adjoint(p[i]);
    const Vec mq = b.M.adjoint(q[i]);
    out.max_violation = std::max(out.max_violation, distance(kp, mq));
    const Vec lkp = b.L.adjoint(kp);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lkp[j];
    tail += b.B->conjugate_value(p[i]) + b.D->conjugate_value(q[i]) + dot(p[i], b.K(b.r));
  }
  out.feasible = out.max_violation <= feas_tol;
  if (!out.feasible) return out;

  // f^* [] h^* reduces to h^* when f = 0 (f^* = indicator of {0}) and to f^*
  // when h = 0.
  double conj = 0.0;
  if (dynamic_cast<const ZeroFunction*>(spec.A.get()) != nullptr) {
    conj = spec.C->conjugate_value(w);
  } else if (spec.C->is_zero()) {
    conj = spec.A->conjugate_value(w);
  } else {
    throw unsupported_operation("dual objective: f^* [] h^* needs f = 0 or h = 0");
  }
  out.value = -conj - tail;
  return out;
}

}  // namespace pdsplit
