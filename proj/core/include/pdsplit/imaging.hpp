#pragma once

#include <cstdint>
#include <string>

#include "pdsplit/linop.hpp"
#include "pdsplit/problem.hpp"
#include "pdsplit/prox.hpp"

namespace pdsplit {

struct Image {
  GridShape shape;
  Vec pixels;  // column-major per channel, see GridShape::index

  void validate() const;
};

enum class Model { ic, mic };

std::string to_string(Model m);
Model parse_model(const std::string& s);

struct ModelConfig {
  Model model = Model::ic;
  double alpha1 = 0.06;
  double alpha2 = 0.2;
  Vec omega1{1.0, 1.0};
  Vec omega2{1.0, 1.0};

  void validate() const;
};

// Denoising by infimal convolution of first- and second-order anisotropic TV
// applied to x:
//   min_x 0.5 ||x - b||^2 + ((a1 ||.||_{1,w1} o D1) [] (a2 ||.||_{1,w2} o D2))(x)
// Blocks: L = Id, K = D1, M = D2. Color channels never interact.
ProblemSpec build_ic_problem(const Image& noisy, const ModelConfig& cfg);

// Same fidelity with the infimal convolution applied to the gradient:
//   min_x 0.5 ||x - b||^2 + (a1 ||.||_{1,w1} [] (a2 ||.||_{1,w2} o Link))(D1 x)
// Blocks: L = D1, K = Id, M = Link.
ProblemSpec build_mic_problem(const Image& noisy, const ModelConfig& cfg);

ProblemSpec build_problem(const Image& noisy, const ModelConfig& cfg);

// Adds i.i.d. N(0, sigma^2) noise with no clamping. The stream is
// std::mt19937_64 seeded with `seed`; each pair of 53-bit uniforms (u1, u2)
// is turned into two normals by the Box-Muller transform, so results are
// reproducible across platforms.
Image add_gaussian_noise(const Image& img, double sigma, std::uint64_t seed);

// 10 log10(||clean - noisy||^2 / ||clean - current||^2); +inf when current == clean.
double isnr(std::span<const double> clean, std::span<const double> noisy,
            std::span<const double> current);

enum class TestImageKind { piecewise_affine, blocks };

TestImageKind parse_test_image_kind(const std::string& s);

// Deterministic synthetic image with values in [0, 1].
//   piecewise_affine: a few polygonal regions, each carrying its own affine ramp.
//   blocks: constant rectangles on a constant background.
Image synthesize_test_image(TestImageKind kind, const GridShape& shape, std::uint64_t seed);

}  // namespace pdsplit
