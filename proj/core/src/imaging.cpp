#include "pdsplit/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "pdsplit/smooth.hpp"

namespace pdsplit {

void Image::validate() const {
  shape.validate();
  if (pixels.size() != shape.size()) {
    throw dimension_error("image has " + std::to_string(pixels.size()) + " values, shape needs " +
                          std::to_string(shape.size()));
  }
  if (!all_finite(pixels)) throw parameter_error("image contains non-finite values");
}

std::string to_string(Model m) { return m == Model::ic ? "ic" : "mic"; }

Model parse_model(const std::string& s) {
  if (s == "ic") return Model::ic;
  if (s == "mic") return Model::mic;
  throw parameter_error("unknown model '" + s + "' (expected ic or mic)");
}

void ModelConfig::validate() const {
  if (!(alpha1 > 0.0) || !std::isfinite(alpha1)) throw parameter_error("alpha1 must be positive");
  if (!(alpha2 > 0.0) || !std::isfinite(alpha2)) throw parameter_error("alpha2 must be positive");
  GroupNormParams{2, omega1, alpha1}.validate();
  GroupNormParams{2, omega2, alpha2}.validate();
}

namespace {

ProximablePtr group_norm(double alpha, const Vec& omega, std::size_t planes) {
  return std::make_shared<GroupNorm>(GroupNormParams{2, omega, alpha}, planes);
}

ProblemSpec fidelity_problem(const Image& b) {
  b.validate();
  ProblemSpec spec;
  spec.n = b.shape.size();
  spec.z.assign(spec.n, 0.0);
  spec.A = std::make_shared<ZeroFunction>(spec.n);
  spec.C = std::make_shared<FidelityGradient>(b.pixels);
  return spec;
}

}  // namespace

ProblemSpec build_ic_problem(const Image& noisy, const ModelConfig& cfg) {
  cfg.validate();
  ProblemSpec spec = fidelity_problem(noisy);
  const std::size_t n = spec.n;
  Block blk{identity(n), make_d1(noisy.shape), make_d2(noisy.shape), Vec(n, 0.0),
            group_norm(cfg.alpha1, cfg.omega1, n), group_norm(cfg.alpha2, cfg.omega2, n)};
  spec.blocks.push_back(std::move(blk));
  return spec;
}

ProblemSpec build_mic_problem(const Image& noisy, const ModelConfig& cfg) {
  cfg.validate();
  ProblemSpec spec = fidelity_problem(noisy);
  const std::size_t n = spec.n;
  Block blk{make_d1(noisy.shape), identity(2 * n), make_second_order_link(noisy.shape),
            Vec(2 * n, 0.0), group_norm(cfg.alpha1, cfg.omega1, n),
            group_norm(cfg.alpha2, cfg.omega2, n)};
  spec.blocks.push_back(std::move(blk));
  return spec;
}

ProblemSpec build_problem(const Image& noisy, const ModelConfig& cfg) {
  return cfg.model == Model::ic ? build_ic_problem(noisy, cfg) : build_mic_problem(noisy, cfg);
}

Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw parameter_error("noise sigma must be finite and nonnegative");
  }
  Image out = img;
  if (sigma == 0.0) return out;
  std::mt19937_64 gen(seed);
  // (0, 1]: avoids log(0)
  auto uniform = [&gen] { return (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53; };
  const std::size_t n = out.pixels.size();
  for (std::size_t i = 0; i < n; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double t = 2.0 * std::numbers::pi * uniform();
    out.pixels[i] += sigma * r * std::cos(t);
    if (i + 1 < n) out.pixels[i + 1] += sigma * r * std::sin(t);
  }
  return out;
}

double isnr(std::span<const double> clean, std::span<const double> noisy,
            std::span<const double> current) {
  const double num = squared_distance(clean, noisy);
  const double den = squared_distance(clean, current);
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(num / den);
}

TestImageKind parse_test_image_kind(const std::string& s) {
  if (s == "piecewise-affine") return TestImageKind::piecewise_affine;
  if (s == "blocks") return TestImageKind::blocks;
  throw parameter_error("unknown test image kind '" + s + "'");
}

Image synthesize_test_image(TestImageKind kind, const GridShape& shape, std::uint64_t seed) {
  shape.validate();
  std::mt19937_64 gen(seed);
  auto unif = [&gen](double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
  };
  Image img{shape, Vec(shape.size(), 0.0)};
  const double rs = shape.rows > 1 ? static_cast<double>(shape.rows - 1) : 1.0;
  const double cs = shape.cols > 1 ? static_cast<double>(shape.cols - 1) : 1.0;

  for (std::size_t c = 0; c < shape.channels; ++c) {
    if (kind == TestImageKind::piecewise_affine) {
      // Three random lines split the square into up to 8 cells (by sign
      // pattern); every cell gets its own affine ramp kept inside [0.05, 0.95].
      struct Line {
        double a, b, off;
      };
      Line lines[3];
      for (auto& l : lines) {
        const double ang = unif(0.0, std::numbers::pi);
        l = {std::cos(ang), std::sin(ang), unif(-0.25, 0.25)};
      }
      double base[8], su[8], sv[8];
      for (int k = 0; k < 8; ++k) {
        base[k] = unif(0.35, 0.65);
        su[k] = unif(-0.3, 0.3);
        sv[k] = unif(-0.3, 0.3);
      }
      for (std::size_t col = 0; col < shape.cols; ++col) {
        for (std::size_t row = 0; row < shape.rows; ++row) {
          const double u = static_cast<double>(col) / cs - 0.5;
          const double v = static_cast<double>(row) / rs - 0.5;
          int cell = 0;
          for (int k = 0; k < 3; ++k) {
            if (lines[k].a * u + lines[k].b * v > lines[k].off) cell |= 1 << k;
          }
          img.pixels[shape.index(row, col, c)] = base[cell] + su[cell] * u + sv[cell] * v;
        }
      }
    } else {
      const double bg = unif(0.1, 0.3);
      std::fill_n(img.pixels.begin() + static_cast<std::ptrdiff_t>(c * shape.plane_size()),
                  shape.plane_size(), bg);
      for (int k = 0; k < 5; ++k) {
        const auto r0 = static_cast<std::size_t>(unif(0.0, 0.7) * static_cast<double>(shape.rows));
        const auto c0 = static_cast<std::size_t>(unif(0.0, 0.7) * static_cast<double>(shape.cols));
        const auto h = std::max<std::size_t>(1, static_cast<std::size_t>(unif(0.15, 0.4) * static_cast<double>(shape.rows)));
        const auto w = std::max<std::size_t>(1, static_cast<std::size_t>(unif(0.15, 0.4) * static_cast<double>(shape.cols)));
        const double val = unif(0.3, 0.9);
        for (std::size_t col = c0; col < std::min(shape.cols, c0 + w); ++col) {
          for (std::size_t row = r0; row < std::min(shape.rows, r0 + h); ++row) {
            img.pixels[shape.index(row, col, c)] = val;
          }
        }
      }
    }
  }
  return img;
}

}  // namespace pdsplit
