#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace lrqmc;

TEST(Mask, SamplerCountAndDeterminism) {
  const ObservationMask a = sample_mask(100, 100, 0.3, 42);
  const ObservationMask b = sample_mask(100, 100, 0.3, 42);
  EXPECT_EQ(a.count(), 3000u);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.seed(), std::optional<std::uint64_t>(42));
  EXPECT_DOUBLE_EQ(a.sampling_ratio(), 0.3);
  const ObservationMask c = sample_mask(100, 100, 0.3, 43);
  EXPECT_FALSE(a == c);
}

TEST(Mask, SamplerExtremes) {
  EXPECT_TRUE(sample_mask(7, 5, 0.0, 1).empty());
  const ObservationMask all = sample_mask(7, 5, 1.0, 1);
  EXPECT_EQ(all, ObservationMask::full(7, 5));
  EXPECT_TRUE(all.complement().empty());
}

TEST(Mask, SamplerRejectsBadRatio) {
  EXPECT_THROW(sample_mask(4, 4, -0.1, 1), ConfigError);
  EXPECT_THROW(sample_mask(4, 4, 1.5, 1), ConfigError);
  EXPECT_THROW(sample_mask(4, 4, std::nan(""), 1), ConfigError);
}

TEST(Mask, SamplerIsRoughlyUniform) {
  // every pixel of a 10 x 10 grid at SR 0.5 should be hit about half the time
  Eigen::MatrixXd hits = Eigen::MatrixXd::Zero(10, 10);
  const int trials = 2000;
  for (int s = 0; s < trials; ++s) hits += sample_mask(10, 10, 0.5, static_cast<std::uint64_t>(s)).indicator();
  hits /= trials;
  EXPECT_LE((hits.array() - 0.5).abs().maxCoeff(), 0.06);
}

TEST(Mask, ExplicitIndicesAreValidated) {
  EXPECT_THROW(ObservationMask(3, 3, {{3, 0}}), InputError);
  EXPECT_THROW(ObservationMask(3, 3, {{0, -1}}), InputError);
  const ObservationMask m(3, 3, {{1, 1}, {0, 2}, {1, 1}});
  EXPECT_EQ(m.count(), 2u);
  EXPECT_NEAR(m.sampling_ratio(), 2.0 / 9.0, 1e-15);
  EXPECT_TRUE(m.contains(0, 2));
  EXPECT_FALSE(m.contains(2, 0));
}

TEST(Mask, ProjectionAlgebra) {
  std::mt19937_64 rng(5);
  const QuaternionMatrix x = testkit::random_q(9, 6, rng);
  const ObservationMask om = sample_mask(9, 6, 0.4, 9);
  const QuaternionMatrix p = project_omega(x, om);
  EXPECT_EQ(project_omega(p, om), p);
  EXPECT_EQ(p + project_omega(x, om.complement()), x);
  EXPECT_LE(frobenius_norm(p), frobenius_norm(x));
  EXPECT_EQ(project_omega(x, ObservationMask::full(9, 6)), x);
  EXPECT_EQ(project_omega(x, sample_mask(9, 6, 0.0, 1)), QuaternionMatrix::zero(9, 6));
  EXPECT_THROW(project_omega(x, sample_mask(6, 9, 0.4, 9)), DimensionError);
}

TEST(Mask, TextRoundTripIsExact) {
  const ObservationMask m = sample_mask(13, 11, 0.37, 77);
  const std::string text = format_mask(m);
  std::istringstream in(text);
  const ObservationMask back = parse_mask(in);
  EXPECT_EQ(back, m);
  EXPECT_EQ(back.seed(), m.seed());
  EXPECT_EQ(back.sampling_ratio(), m.sampling_ratio());
  EXPECT_EQ(format_mask(back), text);

  const auto path = std::filesystem::temp_directory_path() / "lrqmc_mask_roundtrip.txt";
  write_mask(path.string(), m);
  EXPECT_EQ(read_mask(path.string()), m);
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), text);
  std::filesystem::remove(path);
}

TEST(Mask, ExplicitMaskRoundTrip) {
  const ObservationMask m(2, 3, {{0, 0}, {1, 2}});
  std::istringstream in(format_mask(m));
  const ObservationMask back = parse_mask(in);
  EXPECT_EQ(back, m);
  EXPECT_FALSE(back.seed().has_value());
}

TEST(Mask, MalformedFilesAreRejected) {
  const auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return parse_mask(in);
  };
  EXPECT_THROW(bad(""), InputError);
  EXPECT_THROW(bad("2 2 0.5\n0,0\n0,1\n"), InputError);
  EXPECT_THROW(bad("2 2 abc 1\n"), InputError);
  EXPECT_THROW(bad("2 2 0.5 x1\n0,0\n0,1\n"), InputError);
  EXPECT_THROW(bad("2 2 0.5 1\n0;0\n0,1\n"), InputError);
  EXPECT_THROW(bad("2 2 0.5 1\n0,0\n5,1\n"), InputError);
  EXPECT_THROW(bad("2 2 0.75 1\n0,0\n0,1\n"), InputError);
  EXPECT_THROW(bad("0 2 0 1\n"), InputError);
  EXPECT_THROW(read_mask("/nonexistent/dir/mask.txt"), InputError);
  EXPECT_NO_THROW(bad("2 2 0.5 1\n0,0\n0,1\n"));
}
