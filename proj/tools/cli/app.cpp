#include "app.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "pdsplit/imaging.hpp"
#include "pdsplit/metrics_csv.hpp"
#include "pdsplit/pnm.hpp"
#include "pdsplit/solvers.hpp"
#include "selfcheck.hpp"

namespace pdsplit::app {

namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> log = [] {
    auto l = std::make_shared<spdlog::logger>("pdsplit",
                                              std::make_shared<spdlog::sinks::stderr_color_sink_mt>());
    l->set_pattern("[%l] %v");
    return l;
  }();
  const char* env = std::getenv("PDSPLIT_LOG_LEVEL");
  log->set_level(env != nullptr ? spdlog::level::from_str(env) : spdlog::level::warn);
  return log;
}

struct RunConfig {
  std::string input;
  std::string synthetic;  // piecewise-affine | blocks, used when no input is given
  std::string size = "64x64";
  std::string output;
  std::string model = "ic";
  std::string solver = "fb";
  double alpha1 = 0.06;
  double alpha2 = 0.2;
  std::vector<double> omega1{1.0, 1.0};
  std::vector<double> omega2{1.0, 1.0};
  std::optional<double> noise_sigma;
  std::uint64_t seed = 0;
  std::string reference;
  std::size_t iters = 500;
  double tol = 1e-8;
  std::string metrics;
  bool timing = false;
  bool objective = true;
  // explicit step sizes
  std::optional<double> tau, theta1, theta2, gamma1, gamma2, sigma, lambda, gamma;
};

struct UsageError : error {
  using error::error;
};

GridShape parse_size(const std::string& s) {
  const auto x = s.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    const auto rows = std::stoul(s.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(s);
    const auto cols = std::stoul(s.substr(x + 1), &used);
    if (used != s.size() - x - 1) throw std::invalid_argument(s);
    GridShape g{rows, cols, 1};
    g.validate();
    return g;
  } catch (const std::exception&) {
    throw UsageError("--size must look like ROWSxCOLS, got '" + s + "'");
  }
}

// The problem instance shared by denoise and bench.
struct Instance {
  Image observed;               // b
  std::optional<Image> clean;   // enables ISNR
  ModelConfig model;
  ProblemSpec spec;
};

Instance load_instance(const RunConfig& cfg) {
  Instance inst;
  Image source;
  if (!cfg.input.empty()) {
    source = read_pnm(cfg.input);
  } else if (!cfg.synthetic.empty()) {
    source = synthesize_test_image(parse_test_image_kind(cfg.synthetic), parse_size(cfg.size), cfg.seed);
  } else {
    throw UsageError("either --input or --synthetic is required");
  }
  if (cfg.noise_sigma) {
    inst.observed = add_gaussian_noise(source, *cfg.noise_sigma, cfg.seed);
    inst.clean = source;
  } else {
    inst.observed = source;
  }
  if (!cfg.reference.empty()) {
    inst.clean = read_pnm(cfg.reference);
    if (!(inst.clean->shape == inst.observed.shape)) {
      throw UsageError("reference image shape does not match the input");
    }
  }
  inst.model.model = parse_model(cfg.model);
  inst.model.alpha1 = cfg.alpha1;
  inst.model.alpha2 = cfg.alpha2;
  inst.model.omega1 = cfg.omega1;
  inst.model.omega2 = cfg.omega2;
  inst.spec = build_problem(inst.observed, inst.model);
  return inst;
}

bool has_fb_steps(const RunConfig& c) {
  return c.tau || c.theta1 || c.theta2 || c.gamma1 || c.gamma2 || c.sigma || c.lambda;
}

FbParams fb_params(const RunConfig& c, const ProblemSpec& spec) {
  FbParams p = default_fb_params(spec);
  if (!has_fb_steps(c)) return p;
  if (c.tau) p.tau = *c.tau;
  for (auto& b : p.blocks) {
    if (c.theta1) b.theta1 = *c.theta1;
    if (c.theta2) b.theta2 = *c.theta2;
    if (c.gamma1) b.gamma1 = *c.gamma1;
    if (c.gamma2) b.gamma2 = *c.gamma2;
    if (c.sigma) b.sigma = *c.sigma;
  }
  if (c.lambda) p.lambda = constant_schedule(*c.lambda);
  return p;
}

FbfParams fbf_params(const RunConfig& c, const ProblemSpec& spec) {
  FbfParams p = default_fbf_params(spec);
  if (c.gamma) p.gamma = constant_schedule(*c.gamma);
  return p;
}

// Raises CertificationError with the violated inequality on failure.
struct CertificationError : error {
  using error::error;
};

void certify(const RunConfig& c, const ProblemSpec& spec, Method m) {
  if (m == Method::fb) {
    const FbParams p = fb_params(c, spec);
    const FbCertificate cert = certify_fb(spec, p);
    if (!cert.ok()) throw CertificationError("step sizes violate the forward-backward condition: " + *cert.violation);
    const double lam = p.lambda(0);
    if (!(lam >= p.epsilon && lam <= cert.lambda_max(p.epsilon))) {
      throw CertificationError("relaxation parameter " + format_shortest(lam) + " outside [" +
                               format_shortest(p.epsilon) + ", " +
                               format_shortest(cert.lambda_max(p.epsilon)) + "]");
    }
    logger()->info("forward-backward steps: tau = {}, alpha_bar = {}, rho = {}", p.tau, cert.alpha_bar, cert.rho);
  } else {
    const FbfParams p = fbf_params(c, spec);
    try {
      check_fbf_step(p, 0, p.gamma(0));
    } catch (const parameter_error& e) {
      throw CertificationError(std::string("step size violates the forward-backward-forward condition: ") + e.what());
    }
    logger()->info("forward-backward-forward: beta = {}, gamma = {}", p.beta, p.gamma(0));
  }
}

Method parse_method(const std::string& s) {
  if (s == "fb") return Method::fb;
  if (s == "fbf") return Method::fbf;
  throw UsageError("unknown solver '" + s + "' (expected fb or fbf)");
}

SolveCallbacks metric_callbacks(const Instance& inst, bool with_objective) {
  SolveCallbacks cb;
  cb.annotate = [&inst, with_objective](const SolverState& s, TraceEntry& e) {
    if (with_objective) {
      std::vector<Vec> y;
      for (const auto& b : s.blocks) y.push_back(b.y);
      e.objective = evaluate_primal_objective(inst.spec, s.x, y);
    }
    if (inst.clean) e.isnr = isnr(inst.clean->pixels, inst.observed.pixels, s.x);
  };
  return cb;
}

SolveResult run_solver(const RunConfig& c, const Instance& inst, Method m, const SolveOptions& so) {
  if (m == Method::fb) return solve(inst.spec, fb_params(c, inst.spec), so);
  return solve(inst.spec, fbf_params(c, inst.spec), so);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw io_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw io_error("error writing '" + path + "'");
}

int cmd_denoise(const RunConfig& c, std::ostream& out) {
  if (c.output.empty()) throw UsageError("--output is required");
  const Method m = parse_method(c.solver);
  const Instance inst = load_instance(c);
  certify(c, inst.spec, m);

  SolveOptions so;
  so.stop.max_iters = c.iters;
  so.stop.tol = c.tol;
  so.callbacks = metric_callbacks(inst, c.objective);
  const SolveResult res = run_solver(c, inst, m, so);

  write_pnm(c.output, Image{inst.observed.shape, res.state.x});
  if (!c.metrics.empty()) write_metrics_csv(c.metrics, res.trace, CsvOptions{c.timing});

  out << "solver=" << to_string(m) << " model=" << c.model << " iterations=" << res.iterations
      << " stop=\"" << to_string(res.reason) << "\"";
  if (!res.trace.entries.empty()) {
    const auto& last = res.trace.entries.back();
    out << " residual=" << format_shortest(last.residual);
    if (last.isnr) out << " isnr=" << format_shortest(*last.isnr);
  }
  out << '\n';
  return kOk;
}

int cmd_validate(std::ostream& out) {
  const auto rows = run_self_checks();
  bool ok = true;
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  out << std::left;
  for (const auto& r : rows) {
    out << (r.passed ? "PASS  " : "FAIL  ");
    out << r.name << std::string(width - r.name.size() + 2, ' ') << "max_error="
        << format_shortest(r.max_error) << " tol=" << format_shortest(r.tolerance) << '\n';
    ok = ok && r.passed;
  }
  out << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  return ok ? kOk : kUsage;
}

// Wraps every block operator of the problem with a shared application counter.
ProblemSpec instrument(const ProblemSpec& spec, const std::shared_ptr<ApplicationCounter>& ctr) {
  ProblemSpec s = spec;
  for (auto& b : s.blocks) {
    b.L = counted(b.L, ctr);
    b.K = counted(b.K, ctr);
    b.M = counted(b.M, ctr);
  }
  return s;
}

int cmd_bench(const RunConfig& c, std::ostream& out) {
  Instance inst = load_instance(c);
  certify(c, inst.spec, Method::fb);
  certify(c, inst.spec, Method::fbf);
  const ProblemSpec plain = inst.spec;

  std::ostringstream csv;
  csv << "solver," << kMetricsHeader << ",operator_applications\n";
  struct Summary {
    std::size_t iters = 0;
    double ops = 0.0;
    double time = 0.0;
  } sum[2];

  for (int k = 0; k < 2; ++k) {
    const Method m = k == 0 ? Method::fb : Method::fbf;
    auto ctr = std::make_shared<ApplicationCounter>();
    inst.spec = instrument(plain, ctr);
    std::uint64_t last_ops = 0;
    SolveOptions so;
    so.stop.max_iters = c.iters;
    so.stop.tol = c.tol;
    // Metrics go through the uninstrumented spec so only solver work is counted.
    Instance view = inst;
    view.spec = plain;
    SolveCallbacks metrics = metric_callbacks(view, c.objective);
    so.callbacks.annotate = [&](const SolverState& s, TraceEntry& e) {
      const std::uint64_t now = ctr->total();
      const std::uint64_t ops = now - last_ops;
      last_ops = now;
      metrics.annotate(s, e);
      csv << to_string(m) << ',' << format_metrics_row(e, CsvOptions{c.timing}) << ',' << ops << '\n';
    };
    const SolveResult res = run_solver(c, inst, m, so);
    sum[k].iters = res.iterations;
    sum[k].ops = res.iterations ? static_cast<double>(ctr->total()) / static_cast<double>(res.iterations) : 0.0;
    sum[k].time = res.iterations && !res.trace.entries.empty()
                      ? res.trace.entries.back().time_s / static_cast<double>(res.iterations)
                      : 0.0;
  }

  if (!c.metrics.empty()) {
    write_text(c.metrics, csv.str());
  } else {
    out << csv.str();
  }
  out << "summary fb_iterations=" << sum[0].iters << " fbf_iterations=" << sum[1].iters
      << " fb_ops_per_iter=" << format_shortest(sum[0].ops)
      << " fbf_ops_per_iter=" << format_shortest(sum[1].ops)
      << " ops_ratio=" << format_shortest(sum[0].ops > 0 ? sum[1].ops / sum[0].ops : 0.0);
  if (c.timing) {
    out << " fb_time_per_iter_s=" << format_shortest(sum[0].time)
        << " fbf_time_per_iter_s=" << format_shortest(sum[1].time)
        << " time_ratio=" << format_shortest(sum[0].time > 0 ? sum[1].time / sum[0].time : 0.0);
  }
  out << '\n';
  return kOk;
}

void add_problem_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--input", c.input, "Input PNM image");
  sub->add_option("--synthetic", c.synthetic, "Synthetic input instead of --input")
      ->check(CLI::IsMember({"piecewise-affine", "blocks"}));
  sub->add_option("--size", c.size, "Synthetic image size ROWSxCOLS")->capture_default_str();
  sub->add_option("--model", c.model, "Regularization model")
      ->check(CLI::IsMember({"ic", "mic"}))
      ->capture_default_str();
  sub->add_option("--alpha1", c.alpha1, "Weight of the first-order term")->capture_default_str();
  sub->add_option("--alpha2", c.alpha2, "Weight of the second-order term")->capture_default_str();
  sub->add_option("--omega1", c.omega1, "Weight pair of the first-order norm")->expected(2);
  sub->add_option("--omega2", c.omega2, "Weight pair of the second-order norm")->expected(2);
  sub->add_option("--noise-sigma", c.noise_sigma, "Add seeded Gaussian noise of this deviation");
  sub->add_option("--seed", c.seed, "Seed for noise and synthetic images")->capture_default_str();
  sub->add_option("--reference", c.reference, "Clean reference image, enables ISNR");
  sub->add_option("--iters", c.iters, "Iteration budget")->capture_default_str();
  sub->add_option("--tol", c.tol, "Residual tolerance relative to the first sweep")->capture_default_str();
  sub->add_option("--metrics", c.metrics, "CSV trace path");
  sub->add_flag("--objective,!--no-objective", c.objective, "Record the primal objective");
  sub->add_option("--tau", c.tau, "Forward-backward primal step");
  sub->add_option("--theta1", c.theta1, "Dual step for the first-order term");
  sub->add_option("--theta2", c.theta2, "Dual step for the second-order term");
  sub->add_option("--gamma1", c.gamma1, "Step for the split variable z");
  sub->add_option("--gamma2", c.gamma2, "Step for the split variable y");
  sub->add_option("--sigma", c.sigma, "Step for the coupling multiplier v");
  sub->add_option("--lambda", c.lambda, "Forward-backward relaxation parameter");
  sub->add_option("--gamma", c.gamma, "Forward-backward-forward step");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  return path;
}

}  // namespace

std::vector<std::string> config_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
    tokens.push_back("--" + key);
    std::istringstream vs(value);
    std::string part;
    while (vs >> part) tokens.push_back(part);
  }
  return tokens;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Primal-dual splitting for infimal-convolution image denoising", "pdsplit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;

  auto* denoise = app.add_subcommand("denoise", "Denoise one image and export the trace");
  add_problem_options(denoise, cfg);
  denoise->add_option("--solver", cfg.solver, "fb or fbf")->check(CLI::IsMember({"fb", "fbf"}))->capture_default_str();
  denoise->add_option("--output", cfg.output, "Output PNM path");
  denoise->add_flag("--timing,!--no-timing", cfg.timing, "Fill the time_s column (off by default for reproducible output)");
  denoise->add_option("--config", config_path, "key=value config file; flags override it");

  auto* validate = app.add_subcommand("validate", "Run the built-in self checks");

  RunConfig bench_cfg;
  bench_cfg.timing = true;
  auto* bench = app.add_subcommand("bench", "Compare both solvers on one instance");
  add_problem_options(bench, bench_cfg);
  bench->add_flag("--timing,!--no-timing", bench_cfg.timing, "Fill the time columns");
  bench->add_option("--config", config_path, "key=value config file; flags override it");

  std::vector<std::string> args = raw_args;
  try {
    if (const auto path = find_config(args); path && !args.empty()) {
      CLI::App* sub = args[0] == "denoise" ? denoise : args[0] == "bench" ? bench : nullptr;
      if (sub == nullptr) throw UsageError("--config is only accepted by denoise and bench");
      auto tokens = config_tokens(read_file(*path));
      for (const auto& t : tokens) {
        if (t.rfind("--", 0) == 0 && (t == "--config" || sub->get_option_no_throw(t) == nullptr)) {
          throw UsageError("unknown config key '" + t.substr(2) + "' in " + *path);
        }
      }
      args.insert(args.begin() + 1, tokens.begin(), tokens.end());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const io_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (denoise->parsed()) return cmd_denoise(cfg, out);
    if (validate->parsed()) return cmd_validate(out);
    return cmd_bench(bench_cfg, out);
  } catch (const io_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const CertificationError& e) {
    err << "error: " << e.what() << '\n';
    return kCertification;
  } catch (const numerical_divergence& e) {
    err << "error: numerical divergence at " << e.what() << '\n';
    return kDivergence;
  } catch (const error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pdsplit::app
