#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "slmon/assessor.hpp"
#include "slmon/histogram.hpp"
#include "test_support.hpp"

using namespace slmon;

namespace {

void expect_code(ErrorCode code, auto&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

void expect_opinion_near(const Opinion& actual, const Opinion& expected, double tol) {
  ASSERT_EQ(actual.dimension(), expected.dimension());
  for (std::size_t i = 0; i < actual.dimension(); ++i) EXPECT_NEAR(actual.belief(i), expected.belief(i), tol);
  EXPECT_NEAR(actual.uncertainty(), expected.uncertainty(), tol);
}

std::vector<double> normalized_belief(const Opinion& op) {
  std::vector<double> out(op.belief().begin(), op.belief().end());
  for (double& v : out) v /= 1.0 - op.uncertainty();
  return out;
}

Opinion refuse(const std::deque<Opinion>& queue, const std::vector<double>& base_rate) {
  Opinion acc = Opinion::vacuous(base_rate);
  for (const auto& op : queue) acc = cumulative_fuse(acc, op);
  return acc;
}

const std::vector<double> kQuad{0.25, 0.25, 0.25, 0.25};

}  // namespace

TEST(UpdateWindow, FirstUpdateReturnsInput) {
  const Opinion input = make_opinion({0.4, 0.1, 0.0, 0.1}, 0.4, kQuad);
  WindowState state = WindowState::fresh(kQuad);
  const Opinion behavior = update_window(state, input, AssessorParams{});
  expect_opinion_near(behavior, input, 1e-12);
  expect_opinion_near(state.st_opinion, input, 1e-12);
  EXPECT_TRUE(state.lt_opinion.is_vacuous());
  EXPECT_EQ(state.st_count(), 1u);
}

TEST(UpdateWindow, SingleSlotWindowEvictsIntoLongTerm) {
  std::mt19937_64 rng(31);
  const Opinion a = testkit::random_opinion(rng, 4, kQuad);
  const Opinion b = testkit::random_opinion(rng, 4, kQuad);
  AssessorParams params;
  params.st_length = 1;
  WindowState state = WindowState::fresh(kQuad);
  update_window(state, a, params);
  update_window(state, b, params);
  expect_opinion_near(state.st_opinion, b, 1e-9);
  expect_opinion_near(state.lt_opinion, a, 1e-9);
  EXPECT_EQ(state.st_count(), 1u);
}

TEST(UpdateWindow, ConstantStreamKeepsNormalizedBelief) {
  // Accumulated evidence lowers u, so the projection moves from the input's
  // towards its normalized belief; the normalized belief itself is preserved.
  const Opinion input = make_opinion({0.3, 0.1, 0.05, 0.05}, 0.5, kQuad);
  WindowState state = WindowState::fresh(kQuad);
  Opinion behavior = input;
  for (int s = 0; s < 40; ++s) behavior = update_window(state, input, AssessorParams{});
  EXPECT_LT(degree_of_conflict(state.st_opinion, state.lt_opinion), AssessorParams{}.gate_threshold);
  EXPECT_LT(behavior.uncertainty(), input.uncertainty());
  const auto nb = normalized_belief(behavior);
  const auto ni = normalized_belief(input);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(nb[i], ni[i], 1e-6);
}

TEST(UpdateWindow, ConstantStreamProportionalToBaseRateKeepsProjection) {
  const std::vector<double> a{0.1, 0.2, 0.3, 0.4};
  const Opinion input = make_opinion({0.05, 0.1, 0.15, 0.2}, 0.5, a);
  WindowState state = WindowState::fresh(a);
  Opinion behavior = input;
  for (int s = 0; s < 25; ++s) behavior = update_window(state, input, AssessorParams{});
  const auto pb = project(behavior);
  const auto pi = project(input);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(pb[i], pi[i], 1e-6);
}

TEST(UpdateWindow, LongTermDecaysGeometrically) {
  const Opinion distinctive = make_opinion({0.5, 0.1, 0.0, 0.0}, 0.4, kQuad);
  AssessorParams params;
  params.st_length = 1;
  params.trust_discount = 0.99;
  WindowState state = WindowState::fresh(kQuad);
  update_window(state, distinctive, params);
  update_window(state, Opinion::vacuous(kQuad), params);
  ASSERT_NEAR(state.lt_opinion.belief(0), 0.5, 1e-12);
  for (int x = 1; x <= 200; ++x) {
    update_window(state, Opinion::vacuous(kQuad), params);
    EXPECT_NEAR(state.lt_opinion.belief(0), std::pow(0.99, x) * 0.5, 1e-6) << "x=" << x;
    EXPECT_NEAR(state.lt_opinion.belief(1), std::pow(0.99, x) * 0.1, 1e-6) << "x=" << x;
  }
}

TEST(UpdateWindow, ShortTermMatchesQueue) {
  const DomainConfig cfg = DomainConfig::uniform();
  const auto a = cfg.joint_base_rate();
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> d(-6.0, 6.0);
  WindowState state = WindowState::fresh(a);
  const AssessorParams params;
  for (int s = 0; s < 600; ++s) {
    update_window(state, input_opinion(d(rng), d(rng), cfg), params);
    ASSERT_LE(state.st_count(), params.st_length);
    expect_opinion_near(state.st_opinion, refuse(state.st_queue, a), 1e-6);
  }
}

TEST(UpdateWindow, GateReturnsShortTermExactly) {
  const DomainConfig cfg = DomainConfig::uniform();
  AssessorParams params;
  WindowState state = WindowState::fresh(cfg.joint_base_rate());
  int gated = 0;
  for (int s = 0; s < 200; ++s) {
    const double dx = s < 120 ? 1.5 : -3.5;
    const Opinion behavior = update_window(state, input_opinion(dx, 0.2, cfg), params);
    if (degree_of_conflict(state.st_opinion, state.lt_opinion) > params.gate_threshold) {
      EXPECT_TRUE(behavior == state.st_opinion);
      ++gated;
    } else {
      expect_opinion_near(behavior, cumulative_fuse(state.st_opinion, state.lt_opinion), 0.0);
    }
  }
  EXPECT_GT(gated, 0);
}

TEST(UpdateWindow, RejectsForeignDomain) {
  WindowState state = WindowState::fresh(kQuad);
  expect_code(ErrorCode::DomainMismatch, [&] { update_window(state, Opinion::vacuous({0.5, 0.5}), AssessorParams{}); });
  expect_code(ErrorCode::DomainMismatch,
              [&] { update_window(state, Opinion::vacuous({0.1, 0.2, 0.3, 0.4}), AssessorParams{}); });
  EXPECT_EQ(state.st_count(), 0u);
}

TEST(Compare, Basics) {
  std::mt19937_64 rng(33);
  const Opinion x = testkit::random_opinion(rng, 4, kQuad);
  const Comparison self = compare(x, x);
  EXPECT_EQ(self.delta, 0.0);
  EXPECT_EQ(self.uncertainty, x.uncertainty());
  EXPECT_EQ(compare(x, Opinion::vacuous(kQuad)).delta, 0.0);
  EXPECT_EQ(compare(Opinion::vacuous(kQuad), x).uncertainty, 1.0);
}

TEST(AssessorParams, Validation) {
  AssessorParams p;
  p.st_length = 0;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.trust_discount = 1.2;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.gate_threshold = -0.1;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Assessor, OrderedPairsPerStep) {
  const DomainConfig cfg = DomainConfig::uniform();
  Assessor assessor({"a", "b", "c"}, cfg.joint_base_rate(), AssessorParams{});
  const Opinion op = input_opinion(1.0, 0.0, cfg);
  const auto records = assessor.step({{"a", op}, {"b", op}, {"c", op}});
  ASSERT_EQ(records.size(), 6u);
  EXPECT_EQ(records[0].system, "a");
  EXPECT_EQ(records[0].reference, "b");
  EXPECT_EQ(records[5].system, "c");
  EXPECT_EQ(records[5].reference, "b");
  for (const auto& r : records) {
    EXPECT_NE(r.system, r.reference);
    EXPECT_EQ(r.step, 0u);
  }
}

TEST(Assessor, IdenticalStreamsAgree) {
  const DomainConfig cfg = DomainConfig::uniform();
  Assessor assessor({"a", "b"}, cfg.joint_base_rate(), AssessorParams{});
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int s = 0; s < 100; ++s) {
    const Opinion op = input_opinion(d(rng), d(rng), cfg);
    for (const auto& r : assessor.step({{"a", op}, {"b", op}})) {
      EXPECT_EQ(r.delta, 0.0);
      EXPECT_FALSE(r.flagged);
    }
  }
}

TEST(Assessor, DeterministicAndBounded) {
  const DomainConfig cfg = DomainConfig::uniform();
  auto run = [&] {
    Assessor assessor({"a", "b", "c"}, cfg.joint_base_rate(), AssessorParams{});
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> d(-6.0, 6.0);
    std::vector<AssessmentRecord> all;
    for (int s = 0; s < 300; ++s) {
      std::map<std::string, Opinion> in;
      for (const char* id : {"a", "b", "c"}) in.emplace(id, input_opinion(d(rng), d(rng), cfg));
      for (auto& r : assessor.step(in)) all.push_back(std::move(r));
    }
    return all;
  };
  const auto first = run();
  const auto second = run();
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].delta, second[i].delta);
    EXPECT_EQ(first[i].uncertainty, second[i].uncertainty);
    EXPECT_GE(first[i].delta, 0.0);
    EXPECT_LE(first[i].delta, 1.0);
    EXPECT_GE(first[i].uncertainty, 0.0);
    EXPECT_LE(first[i].uncertainty, 1.0);
    EXPECT_EQ(first[i].flagged, first[i].delta > AssessorParams{}.event_threshold);
  }
}

TEST(Assessor, Errors) {
  const DomainConfig cfg = DomainConfig::uniform();
  expect_code(ErrorCode::ConfigError, [&] { Assessor({"a"}, cfg.joint_base_rate(), AssessorParams{}); });
  expect_code(ErrorCode::ConfigError, [&] { Assessor({"a", "a"}, cfg.joint_base_rate(), AssessorParams{}); });
  Assessor assessor({"a", "b"}, cfg.joint_base_rate(), AssessorParams{});
  const Opinion op = input_opinion(0.0, 0.0, cfg);
  expect_code(ErrorCode::MissingSystem, [&] { assessor.step({{"a", op}}); });
}
