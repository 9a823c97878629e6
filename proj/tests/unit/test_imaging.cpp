#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "pdsplit/imaging.hpp"
#include "pdsplit/metrics_csv.hpp"
#include "pdsplit/pnm.hpp"
#include "pdsplit/solvers.hpp"
#include "test_support.hpp"

using namespace pdsplit;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pdsplit_imaging_" + name);
}

}  // namespace

TEST(Builders, IcShapes) {
  const GridShape g{4, 3, 1};
  const ProblemSpec s = build_ic_problem(Image{g, Vec(12, 0.2)}, {});
  ASSERT_EQ(s.blocks.size(), 1u);
  EXPECT_EQ(s.n, 12u);
  EXPECT_EQ(s.blocks[0].L.out_dim(), 12u);
  EXPECT_EQ(s.blocks[0].K.out_dim(), 24u);
  EXPECT_EQ(s.blocks[0].M.out_dim(), 24u);
  EXPECT_DOUBLE_EQ(s.mu(), 1.0);
  EXPECT_TRUE(s.C->cocoercive());
}

TEST(Builders, MicDualDimensions) {
  const GridShape g{4, 3, 3};
  const ProblemSpec s = build_mic_problem(Image{g, Vec(36, 0.2)}, {Model::mic});
  const SolverState st = SolverState::zeros(s);
  EXPECT_EQ(st.blocks[0].p.size(), 72u);
  EXPECT_EQ(st.blocks[0].q.size(), 72u);
  EXPECT_EQ(st.blocks[0].v.size(), 72u);
}

TEST(Builders, RejectBadConfig) {
  const Image img{GridShape{2, 2, 1}, Vec(4, 0.0)};
  ModelConfig c;
  c.alpha1 = 0.0;
  EXPECT_THROW(build_ic_problem(img, c), parameter_error);
  ModelConfig d;
  d.omega2 = {1.0, -1.0};
  EXPECT_THROW(build_mic_problem(img, d), parameter_error);
  EXPECT_THROW(build_ic_problem(Image{GridShape{2, 2, 1}, Vec(3, 0.0)}, {}), dimension_error);
  EXPECT_THROW(parse_model("tv"), parameter_error);
}

TEST(Builders, DefaultsCertify) {
  const Image img = synthesize_test_image(TestImageKind::blocks, GridShape{8, 8, 1}, 1);
  for (Model m : {Model::ic, Model::mic}) {
    const ProblemSpec s = build_problem(img, ModelConfig{m});
    EXPECT_TRUE(validate_problem(s).empty());
    EXPECT_TRUE(certify_fb(s, default_fb_params(s)).ok());
    EXPECT_NO_THROW(check_fbf_step(default_fbf_params(s), 0, default_fbf_params(s).gamma(0)));
  }
}

TEST(Denoising, ConstantImageIsRecovered) {
  const GridShape g{8, 8, 1};
  const Image b{g, Vec(g.size(), 0.37)};
  for (Model m : {Model::ic, Model::mic}) {
    for (Method meth : {Method::fb, Method::fbf}) {
      const SolveResult r = solve(build_problem(b, ModelConfig{m}), meth, {});
      EXPECT_LE(test::max_abs_diff(r.state.x, b.pixels), 1e-6);
    }
  }
}

TEST(Denoising, NoisyConstantBecomesConstant) {
  const GridShape g{8, 8, 1};
  const Image clean{g, Vec(g.size(), 0.5)};
  const Image noisy = add_gaussian_noise(clean, 0.05, 3);
  ModelConfig cfg;
  cfg.alpha1 = 2.0;
  cfg.alpha2 = 2.0;
  SolveOptions so;
  so.stop.max_iters = 20000;
  so.stop.tol = 1e-12;
  const SolveResult r = solve(build_ic_problem(noisy, cfg), Method::fb, so);
  double mean = 0.0;
  for (double v : noisy.pixels) mean += v;
  mean /= static_cast<double>(g.size());
  for (double v : r.state.x) EXPECT_NEAR(v, mean, 1e-4);
}

TEST(Denoising, VanishingWeightsReturnData) {
  const Image clean = synthesize_test_image(TestImageKind::piecewise_affine, GridShape{6, 6, 1}, 2);
  const Image b = add_gaussian_noise(clean, 0.08, 1);
  ModelConfig cfg;
  cfg.alpha1 = 1e-12;
  cfg.alpha2 = 1e-12;
  const SolveResult r = solve(build_ic_problem(b, cfg), Method::fbf, {});
  EXPECT_LE(test::max_abs_diff(r.state.x, b.pixels), 1e-6);
}

TEST(Noise, Properties) {
  const Image img{GridShape{10, 10, 1}, Vec(100, 0.3)};
  EXPECT_EQ(add_gaussian_noise(img, 0.0, 5).pixels, img.pixels);
  EXPECT_EQ(add_gaussian_noise(img, 0.1, 5).pixels, add_gaussian_noise(img, 0.1, 5).pixels);
  EXPECT_NE(add_gaussian_noise(img, 0.1, 5).pixels, add_gaussian_noise(img, 0.1, 6).pixels);
  EXPECT_THROW(add_gaussian_noise(img, -0.1, 5), parameter_error);
}

TEST(Noise, SampleVariance) {
  const GridShape g{1000, 1000, 1};
  const double sigma = 0.08;
  const Image noisy = add_gaussian_noise(Image{g, Vec(g.size(), 0.0)}, sigma, 77);
  double mean = 0.0, sq = 0.0;
  for (double v : noisy.pixels) {
    mean += v;
    sq += v * v;
  }
  mean /= 1e6;
  const double var = sq / 1e6 - mean * mean;
  EXPECT_NEAR(var / (sigma * sigma), 1.0, 0.01);
  EXPECT_NEAR(mean, 0.0, 5.0 * sigma / 1000.0);
  // No clamping: values leave [0, 1].
  EXPECT_LT(*std::min_element(noisy.pixels.begin(), noisy.pixels.end()), 0.0);
}

TEST(Isnr, Formula) {
  const Vec x{0.0, 0.0}, b{1.0, 1.0};
  EXPECT_DOUBLE_EQ(isnr(x, b, b), 0.0);
  EXPECT_NEAR(isnr(x, b, Vec{std::sqrt(0.1), std::sqrt(0.1)}), 10.0, 1e-12);
  EXPECT_NEAR(isnr(x, b, Vec{std::sqrt(2.0), std::sqrt(2.0)}), -3.0103, 1e-4);
  EXPECT_EQ(isnr(x, b, x), std::numeric_limits<double>::infinity());
}

TEST(Synthetic, DeterministicAndInRange) {
  const GridShape g{32, 24, 1};
  for (auto kind : {TestImageKind::piecewise_affine, TestImageKind::blocks}) {
    const Image a = synthesize_test_image(kind, g, 4);
    EXPECT_EQ(a.pixels, synthesize_test_image(kind, g, 4).pixels);
    EXPECT_NE(a.pixels, synthesize_test_image(kind, g, 5).pixels);
    for (double v : a.pixels) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Synthetic, BlocksHaveSparseGradient) {
  const GridShape g{32, 32, 1};
  const Image a = synthesize_test_image(TestImageKind::blocks, g, 4);
  const Vec d = make_d1(g)(a.pixels);
  const auto nonzero = std::count_if(d.begin(), d.end(), [](double v) { return v != 0.0; });
  EXPECT_GT(nonzero, 0);
  EXPECT_LT(static_cast<double>(nonzero), 0.25 * static_cast<double>(d.size()));
}

// Second differences vanish away from region boundaries and the grid border.
TEST(Synthetic, AffinePiecesHaveNoCurvatureInside) {
  const GridShape g{32, 32, 1};
  const Image a = synthesize_test_image(TestImageKind::piecewise_affine, g, 9);
  const Vec d2 = make_d2(g)(a.pixels);
  std::size_t nonzero = 0;
  for (double v : d2) nonzero += std::abs(v) > 1e-12 ? 1 : 0;
  // Border rows/cols contribute at most 2 * 2 * 32 entries per plane; three
  // straight region boundaries cross each row or column at most three times.
  const std::size_t bound = 2 * (2 * g.cols + 2 * g.rows) + 2 * 3 * 2 * (g.rows + g.cols);
  EXPECT_GT(nonzero, 0u);
  EXPECT_LE(nonzero, bound);
  EXPECT_LT(nonzero, d2.size() / 2);
}

TEST(Pnm, RoundTripGray) {
  const GridShape g{3, 5, 1};
  Image img{g, Vec(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) img.pixels[i] = static_cast<double>(i * 17 % 256) / 255.0;
  const auto path = temp_file("gray.pgm");
  write_pnm(path, img);
  const Image back = read_pnm(path);
  EXPECT_EQ(back.shape, g);
  EXPECT_LE(test::max_abs_diff(back.pixels, img.pixels), 1e-15);
}

TEST(Pnm, RowMajorScanlines) {
  // 2 rows x 3 cols, ASCII
  const Image img = parse_pnm("P2\n# comment\n3 2\n255\n0 1 2\n3 4 5\n");
  EXPECT_EQ(img.shape, (GridShape{2, 3, 1}));
  EXPECT_DOUBLE_EQ(img.pixels[img.shape.index(0, 2)], 2.0 / 255.0);
  EXPECT_DOUBLE_EQ(img.pixels[img.shape.index(1, 0)], 3.0 / 255.0);
  EXPECT_DOUBLE_EQ(img.pixels[1], 3.0 / 255.0);  // column-major: (row 1, col 0)
}

TEST(Pnm, ColorAndWideFormats) {
  const Image c = parse_pnm("P3 2 1 255  255 0 0   0 0 255");
  EXPECT_EQ(c.shape, (GridShape{1, 2, 3}));
  EXPECT_DOUBLE_EQ(c.pixels[c.shape.index(0, 0, 0)], 1.0);
  EXPECT_DOUBLE_EQ(c.pixels[c.shape.index(0, 1, 2)], 1.0);
  EXPECT_DOUBLE_EQ(c.pixels[c.shape.index(0, 1, 0)], 0.0);
  std::string wide = "P5\n1 1\n65535\n";
  wide += static_cast<char>(0x80);
  wide += static_cast<char>(0x00);
  EXPECT_NEAR(parse_pnm(wide).pixels[0], 32768.0 / 65535.0, 1e-15);
  const std::string enc = encode_pnm(c);
  EXPECT_EQ(enc.substr(0, 11), "P6\n2 1\n255\n");
  EXPECT_EQ(parse_pnm(enc).pixels, c.pixels);
}

TEST(Pnm, ClampsAndRoundsOnWrite) {
  const Image img{GridShape{1, 4, 1}, {-0.2, 1.7, 0.5, 0.499 / 255.0}};
  const std::string enc = encode_pnm(img);
  const std::string data = enc.substr(enc.size() - 4);
  EXPECT_EQ(static_cast<unsigned char>(data[0]), 0);
  EXPECT_EQ(static_cast<unsigned char>(data[1]), 255);
  EXPECT_EQ(static_cast<unsigned char>(data[2]), 128);
  EXPECT_EQ(static_cast<unsigned char>(data[3]), 0);
}

TEST(Pnm, Errors) {
  EXPECT_THROW(read_pnm("/nonexistent/dir/x.pgm"), io_error);
  EXPECT_THROW(parse_pnm("P4\n1 1\n"), io_error);
  EXPECT_THROW(parse_pnm("P5\n2 2\n255\nab"), io_error);
  EXPECT_THROW(parse_pnm("P2\n1 1\n10\n11\n"), io_error);
  EXPECT_THROW(parse_pnm("P2\n0 1\n10\n"), io_error);
}

TEST(MetricsCsv, HeaderAndEmptyFields) {
  MetricsTrace t;
  TraceEntry a;
  a.iter = 1;
  a.time_s = 0.25;
  a.residual = 0.1;
  TraceEntry b = a;
  b.iter = 2;
  b.objective = 1.5;
  b.isnr = -3.0;
  t.entries = {a, b};
  EXPECT_EQ(metrics_to_csv(t),
            "iter,time_s,objective,fixed_point_residual,isnr\n1,0.25,,0.1,\n2,0.25,1.5,0.1,-3\n");
  EXPECT_EQ(metrics_to_csv(t, CsvOptions{false}),
            "iter,time_s,objective,fixed_point_residual,isnr\n1,,,0.1,\n2,,1.5,0.1,-3\n");
}

TEST(MetricsCsv, ShortestRoundTrip) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 1000; ++k) {
    const double v = test::gaussian(rng, 1, 1e3)[0] * std::pow(10.0, test::uniform(rng, -20, 20));
    EXPECT_EQ(std::stod(format_shortest(v)), v);
  }
  EXPECT_EQ(format_shortest(0.1), "0.1");
  EXPECT_EQ(format_shortest(1e-300), "1e-300");
}
