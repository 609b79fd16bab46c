#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "slmon/histogram.hpp"

using namespace slmon;

namespace {

const HistogramSpec kQuarter{-1.0, 1.0, 4};

}  // namespace

TEST(BinIndex, OpenEndedOuterBins) {
  EXPECT_EQ(bin_index(kQuarter.min - 100, kQuarter), 0u);
  EXPECT_EQ(bin_index(kQuarter.max + 100, kQuarter), 3u);
  const HistogramSpec def{};
  EXPECT_EQ(bin_index(-1e9, def), 0u);
  EXPECT_EQ(bin_index(1e9, def), 9u);
}

TEST(BinIndex, InteriorBins) {
  EXPECT_EQ(bin_index(0.1, kQuarter), 2u);
  EXPECT_EQ(bin_index(-0.5, kQuarter), 1u);
  EXPECT_EQ(bin_index(-0.5000001, kQuarter), 0u);
  EXPECT_EQ(bin_index(0.0, kQuarter), 2u);
  EXPECT_EQ(bin_index(0.5, kQuarter), 3u);
  EXPECT_EQ(bin_index(0.4999999, kQuarter), 2u);
}

TEST(BinIndex, BordersAreHalfOpen) {
  const HistogramSpec spec{-5.0, 5.0, 10};
  for (std::size_t i = 1; i < spec.bins; ++i) {
    EXPECT_EQ(bin_index(spec.border(i), spec), i);
    EXPECT_EQ(bin_index(std::nextafter(spec.border(i), -INFINITY), spec), i - 1);
  }
}

TEST(BinIndex, RejectsNonFinite) {
  EXPECT_THROW(bin_index(std::nan(""), kQuarter), Error);
  EXPECT_THROW(bin_index(INFINITY, kQuarter), Error);
}

TEST(BinIndex, Monotone) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> v(-8.0, 8.0);
  const HistogramSpec spec{-5.0, 5.0, 10};
  for (int n = 0; n < 20000; ++n) {
    double a = v(rng);
    double b = v(rng);
    if (a > b) std::swap(a, b);
    EXPECT_LE(bin_index(a, spec), bin_index(b, spec));
  }
}

TEST(DeltaToHistogram, OneHot) {
  EXPECT_EQ(delta_to_histogram(0.1, kQuarter).counts, (std::vector<double>{0, 0, 1, 0}));
  EXPECT_EQ(delta_to_histogram(-100, kQuarter).counts, (std::vector<double>{1, 0, 0, 0}));
  EXPECT_EQ(delta_to_histogram(0.1, kQuarter).counts, delta_to_histogram(0.1, kQuarter).counts);
}

TEST(HistogramSpec, Validation) {
  EXPECT_THROW((HistogramSpec{1.0, 1.0, 4}).validate(), Error);
  EXPECT_THROW((HistogramSpec{-1.0, 1.0, 1}).validate(), Error);
  EXPECT_NO_THROW(HistogramSpec{}.validate());
}

TEST(InputOpinion, TwoByTwoJoint) {
  const DomainConfig cfg = DomainConfig::uniform({-1, 1, 2}, {-1, 1, 2});
  const Opinion joint = input_opinion(-3.0, -3.0, cfg);
  const auto p = project(joint);
  const std::vector<double> expected{4.0 / 9, 2.0 / 9, 2.0 / 9, 1.0 / 9};
  ASSERT_EQ(p.size(), 4u);
  for (std::size_t s = 0; s < 4; ++s) EXPECT_NEAR(p[s], expected[s], 1e-12);
  EXPECT_NEAR(joint.uncertainty(), 4.0 / 9, 1e-12);
}

TEST(InputOpinion, JointBaseRateIsOuterProduct) {
  DomainConfig cfg = DomainConfig::uniform({-1, 1, 2}, {-2, 2, 3});
  cfg.base_rate_x = {0.3, 0.7};
  cfg.base_rate_y = {0.2, 0.5, 0.3};
  cfg.validate();
  const Opinion joint = input_opinion(0.4, -1.9, cfg);
  const auto a = cfg.joint_base_rate();
  for (std::size_t s = 0; s < a.size(); ++s) EXPECT_NEAR(joint.base_rate(s), a[s], 1e-15);
  EXPECT_NEAR(joint.base_rate(3), 0.7 * 0.2, 1e-15);
}

TEST(InputOpinion, NeverDogmaticNorVacuous) {
  const DomainConfig cfg = DomainConfig::uniform();
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> v(-10.0, 10.0);
  for (int n = 0; n < 2000; ++n) {
    const Opinion op = input_opinion(v(rng), v(rng), cfg);
    EXPECT_GT(op.uncertainty(), 0.0);
    EXPECT_LT(op.uncertainty(), 1.0);
    double total = op.uncertainty();
    for (double b : op.belief()) total += b;
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(InputOpinion, SameBinGivesIdenticalOpinion) {
  const DomainConfig cfg = DomainConfig::uniform();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> offset(0.0, 0.999);
  for (int n = 0; n < 500; ++n) {
    const double bx = -4.0 + static_cast<double>(n % 8);
    const double by = -4.0 + static_cast<double>((n / 8) % 8);
    const Opinion a = input_opinion(bx + offset(rng), by + offset(rng), cfg);
    const Opinion b = input_opinion(bx + offset(rng), by + offset(rng), cfg);
    EXPECT_TRUE(a == b);
  }
}

TEST(InputOpinion, RejectsNonFinite) {
  EXPECT_THROW(input_opinion(std::nan(""), 0.0, DomainConfig::uniform()), Error);
}
