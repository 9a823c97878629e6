#include "pdsplit/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace pdsplit::oracle {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

// Minimizes a unimodal function on [lo, hi]; returns (argmin, value).
template <typename F>
std::pair<double, double> golden(F&& fn, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c), fd = fn(d);
  const double floor = 4.0 * std::numeric_limits<double>::epsilon();
  while (b - a > std::max({tol, floor * (std::abs(a) + std::abs(b)), 1e-300}) && a < c && c < d && d < b) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  const double m = 0.5 * (a + b);
  const double fm = fn(m);
  // The midpoint can lose to a probe by rounding; keep the best.
  if (fc < fm && fc <= fd) return {c, fc};
  if (fd < fm) return {d, fd};
  return {m, fm};
}

}  // namespace

Vec prox_by_minimization(const Objective& f, double gamma, std::span<const double> x, double tol,
                         double radius) {
  const std::size_t dim = x.size();
  if (dim == 0 || dim > 3) throw dimension_error("prox_by_minimization: dimension must be 1..3");
  if (!(gamma > 0.0)) throw parameter_error("prox_by_minimization: gamma must be positive");

  double xinf = 0.0;
  for (double v : x) xinf = std::max(xinf, std::abs(v));
  double R = radius > 0.0 ? radius : 4.0 * (1.0 + xinf);

  Vec y(dim);
  auto objective = [&](const Vec& v) {
    const double fv = f(v);
    if (!std::isfinite(fv)) throw parameter_error("prox_by_minimization: f is not finite on the box");
    double q = 0.0;
    for (std::size_t i = 0; i < dim; ++i) q += (v[i] - x[i]) * (v[i] - x[i]);
    return gamma * fv + 0.5 * q;
  };

  for (int attempt = 0; attempt < 8; ++attempt) {
    // Minimizes over coordinates k..dim-1 with the leading ones fixed in y.
    std::function<double(std::size_t)> inner = [&](std::size_t k) -> double {
      if (k == dim) return objective(y);
      auto line = [&](double t) {
        y[k] = t;
        return inner(k + 1);
      };
      // Inner levels feed values to the outer search, so they are resolved
      // to rounding level; a kinked f would otherwise turn the bracket width
      // into noise of size slope * tol at the outer level.
      const auto [arg, val] = golden(line, x[k] - R, x[k] + R, k == 0 ? tol : 0.0);
      y[k] = arg;
      // Re-run the tail so y holds the argmin of the full nested problem.
      inner(k + 1);
      return val;
    };
    inner(0);
    bool on_boundary = false;
    for (std::size_t i = 0; i < dim; ++i) {
      if (std::abs(y[i] - x[i]) > R - 10.0 * tol) on_boundary = true;
    }
    if (!on_boundary) return y;
    R *= 2.0;
  }
  throw parameter_error("prox_by_minimization: minimizer escapes every search box");
}

// ---------------------------------------------------------------------------

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_dense(const LinearMap& op) {
  MatrixXd m(op.out_dim(), op.in_dim());
  Vec e(op.in_dim(), 0.0), col(op.out_dim());
  for (std::size_t j = 0; j < op.in_dim(); ++j) {
    e[j] = 1.0;
    op.apply(e, col);
    for (std::size_t i = 0; i < op.out_dim(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    e[j] = 0.0;
  }
  return m;
}

VectorXd to_eigen(std::span<const double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

// A convex term phi(u) of a supported kind, with its own formulas for value,
// a subgradient, and the smoothed gradient / Hessian (smoothing only affects
// the group norm).
struct Term {
  enum Kind { zero, squared, fidelity, group } kind = zero;
  double c = 1.0;        // squared norm weight
  VectorXd b;            // fidelity data
  double alpha = 0.0;    // group norm
  Vec weights;
  std::size_t planes = 0;

  double value(const VectorXd& u, double eps) const {
    switch (kind) {
      case zero: return 0.0;
      case squared: return 0.5 * c * u.squaredNorm();
      case fidelity: return 0.5 * (u - b).squaredNorm();
      case group: {
        double s = 0.0;
        for (std::size_t p = 0; p < planes; ++p) {
          double a = 0.0;
          for (std::size_t j = 0; j < weights.size(); ++j) {
            const double v = u(static_cast<Eigen::Index>(j * planes + p));
            a += weights[j] * v * v;
          }
          s += eps > 0.0 ? std::sqrt(a + eps * eps) - eps : std::sqrt(a);
        }
        return alpha * s;
      }
    }
    return 0.0;
  }

  // Subgradient (eps = 0) or gradient of the smoothed term; Hessian if asked.
  VectorXd gradient(const VectorXd& u, double eps, MatrixXd* hess) const {
    const auto d = u.size();
    VectorXd g = VectorXd::Zero(d);
    if (hess != nullptr) hess->setZero(d, d);
    switch (kind) {
      case zero: break;
      case squared:
        g = c * u;
        if (hess != nullptr) hess->diagonal().setConstant(c);
        break;
      case fidelity:
        g = u - b;
        if (hess != nullptr) hess->diagonal().setConstant(1.0);
        break;
      case group:
        for (std::size_t p = 0; p < planes; ++p) {
          double a = 0.0;
          for (std::size_t j = 0; j < weights.size(); ++j) {
            const double v = u(static_cast<Eigen::Index>(j * planes + p));
            a += weights[j] * v * v;
          }
          const double s = std::sqrt(a + eps * eps);
          if (s == 0.0) continue;
          for (std::size_t j = 0; j < weights.size(); ++j) {
            const auto ij = static_cast<Eigen::Index>(j * planes + p);
            g(ij) = alpha * weights[j] * u(ij) / s;
          }
          if (hess != nullptr) {
            for (std::size_t j = 0; j < weights.size(); ++j) {
              const auto ij = static_cast<Eigen::Index>(j * planes + p);
              const double wuj = weights[j] * u(ij);
              (*hess)(ij, ij) += alpha * weights[j] / s;
              for (std::size_t k = 0; k < weights.size(); ++k) {
                const auto ik = static_cast<Eigen::Index>(k * planes + p);
                (*hess)(ij, ik) -= alpha * wuj * weights[k] * u(ik) / (s * s * s);
              }
            }
          }
        }
        break;
    }
    return g;
  }
};

Term classify(const Proximable& f) {
  Term t;
  if (dynamic_cast<const ZeroFunction*>(&f) != nullptr) {
    t.kind = Term::zero;
  } else if (const auto* s = dynamic_cast<const SquaredNorm*>(&f)) {
    t.kind = Term::squared;
    t.c = s->weight();
  } else if (const auto* q = dynamic_cast<const QuadraticFidelity*>(&f)) {
    t.kind = Term::fidelity;
    t.b = to_eigen(q->data());
  } else if (const auto* g = dynamic_cast<const GroupNorm*>(&f)) {
    t.kind = Term::group;
    t.alpha = g->params().alpha;
    t.weights = g->params().weights;
    t.planes = g->planes();
  } else {
    throw unsupported_operation("reference_solve: unsupported function '" + f.name() + "'");
  }
  return t;
}

Term classify(const SmoothOperator& c) {
  Term t;
  if (c.is_zero()) {
    t.kind = Term::zero;
  } else if (const auto* fg = dynamic_cast<const FidelityGradient*>(&c)) {
    t.kind = Term::fidelity;
    t.b = to_eigen(fg->data());
  } else {
    throw unsupported_operation("reference_solve: C must be zero or a fidelity gradient");
  }
  return t;
}

// Term composed with an affine map w -> J w + c of the stacked variable.
struct Piece {
  Term term;
  MatrixXd J;
  VectorXd c;
};

struct Model {
  Eigen::Index dim = 0;
  std::size_t n = 0;
  std::vector<std::size_t> offsets;  // start of y_i in w
  std::vector<std::size_t> sizes;
  VectorXd linear;  // -z padded with zeros
  std::vector<Piece> pieces;

  double value(const VectorXd& w, double eps) const {
    double v = linear.dot(w);
    for (const auto& p : pieces) v += p.term.value(p.J * w + p.c, eps);
    return v;
  }

  VectorXd gradient(const VectorXd& w, double eps, MatrixXd* hess) const {
    VectorXd g = linear;
    if (hess != nullptr) hess->setZero(dim, dim);
    MatrixXd h;
    for (const auto& p : pieces) {
      const VectorXd gu = p.term.gradient(p.J * w + p.c, eps, hess != nullptr ? &h : nullptr);
      g += p.J.transpose() * gu;
      if (hess != nullptr) *hess += p.J.transpose() * h * p.J;
    }
    return g;
  }
};

Model build_model(const ProblemSpec& spec) {
  require_valid(spec);
  Model m;
  m.n = spec.n;
  std::size_t total = spec.n;
  for (const auto& b : spec.blocks) {
    m.offsets.push_back(total);
    m.sizes.push_back(b.L.out_dim());
    total += b.L.out_dim();
  }
  if (total > 256) throw dimension_error("reference_solve: total dimension exceeds 256");
  m.dim = static_cast<Eigen::Index>(total);
  const auto n = static_cast<Eigen::Index>(spec.n);

  m.linear = VectorXd::Zero(m.dim);
  m.linear.head(n) = -to_eigen(spec.z);

  MatrixXd sel_x = MatrixXd::Zero(n, m.dim);
  sel_x.leftCols(n).setIdentity();
  m.pieces.push_back({classify(*spec.A), sel_x, VectorXd::Zero(n)});
  m.pieces.push_back({classify(*spec.C), sel_x, VectorXd::Zero(n)});

  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const auto& b = spec.blocks[i];
    const MatrixXd L = to_dense(b.L), K = to_dense(b.K), M = to_dense(b.M);
    const auto off = static_cast<Eigen::Index>(m.offsets[i]);
    const auto g = static_cast<Eigen::Index>(m.sizes[i]);

    MatrixXd jg = MatrixXd::Zero(K.rows(), m.dim);
    jg.leftCols(n) = K * L;
    jg.middleCols(off, g) = -K;
    m.pieces.push_back({classify(*b.B), jg, -(K * to_eigen(b.r))});

    MatrixXd jl = MatrixXd::Zero(M.rows(), m.dim);
    jl.middleCols(off, g) = M;
    m.pieces.push_back({classify(*b.D), jl, VectorXd::Zero(M.rows())});
  }
  return m;
}

// Damped Newton with Armijo backtracking on the eps-smoothed objective.
VectorXd newton(const Model& m, VectorXd w, double eps) {
  MatrixXd H;
  double fw = m.value(w, eps);
  for (int it = 0; it < 200; ++it) {
    const VectorXd g = m.gradient(w, eps, &H);
    if (g.norm() <= 1e-13 * (1.0 + std::abs(fw))) break;
    const double shift = 1e-14 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
    H.diagonal().array() += shift;
    const VectorXd step = H.ldlt().solve(-g);
    double slope = g.dot(step);
    VectorXd dir = step;
    if (!(slope < 0.0) || !dir.allFinite()) {
      dir = -g;
      slope = -g.squaredNorm();
    }
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const VectorXd cand = w + t * dir;
      const double fc = m.value(cand, eps);
      if (fc <= fw + 1e-4 * t * slope) {
        w = cand;
        moved = fw - fc > 0.0 || t == 1.0;
        fw = fc;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return w;
}

}  // namespace

double joint_objective(const ProblemSpec& spec, std::span<const double> x,
                       std::span<const Vec> y) {
  const Model m = build_model(spec);
  require_same_size(spec.n, x.size(), "joint_objective x");
  require_same_size(spec.blocks.size(), y.size(), "joint_objective y");
  VectorXd w(m.dim);
  w.head(static_cast<Eigen::Index>(spec.n)) = to_eigen(x);
  for (std::size_t i = 0; i < y.size(); ++i) {
    require_same_size(m.sizes[i], y[i].size(), "joint_objective y_i");
    w.segment(static_cast<Eigen::Index>(m.offsets[i]), static_cast<Eigen::Index>(m.sizes[i])) =
        to_eigen(y[i]);
  }
  return m.value(w, 0.0);
}

ReferenceResult reference_solve(const ProblemSpec& spec, const ReferenceOptions& opt) {
  const Model m = build_model(spec);

  // Phase 1: normalized subgradient steps a / sqrt(k).
  VectorXd w = VectorXd::Zero(m.dim);
  VectorXd best = w;
  double best_val = m.value(w, 0.0);
  for (std::size_t k = 1; k <= opt.subgradient_iters; ++k) {
    const VectorXd g = m.gradient(w, 0.0, nullptr);
    const double gn = g.norm();
    if (gn == 0.0) break;
    w -= (opt.subgradient_step / std::sqrt(static_cast<double>(k)) / gn) * g;
    const double v = m.value(w, 0.0);
    if (v < best_val) {
      best_val = v;
      best = w;
    }
  }

  // Phase 2: continuation in the smoothing parameter.
  VectorXd cur = best;
  double prev_val = std::numeric_limits<double>::infinity();
  double last_change = std::numeric_limits<double>::infinity();
  for (double eps = 1e-1; eps >= opt.final_smoothing * 0.999; eps *= 0.1) {
    cur = newton(m, cur, eps);
    const double v = m.value(cur, 0.0);
    last_change = std::abs(v - prev_val);
    prev_val = v;
  }

  ReferenceResult res;
  const double refined = m.value(cur, 0.0);
  const VectorXd& final_w = refined <= best_val ? cur : best;
  res.objective = std::min(refined, best_val);
  res.subgradient_objective = best_val;
  res.certified = last_change <= 1e-8 * (1.0 + std::abs(refined)) && refined <= best_val + 1e-12;
  res.x.assign(final_w.data(), final_w.data() + spec.n);
  for (std::size_t i = 0; i < spec.blocks.size(); ++i) {
    const double* p = final_w.data() + m.offsets[i];
    res.y.emplace_back(p, p + m.sizes[i]);
  }
  return res;
}

}  // namespace pdsplit::oracle
