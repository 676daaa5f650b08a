#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "selmon/cost.hpp"
#include "selmon/simulation.hpp"
#include "support/criteria.hpp"
#include "support/fixtures.hpp"

using namespace selmon;
using namespace testing_support;

TEST(Seeds, TrialSeedsAreReproducibleAndDistinct) {
  EXPECT_EQ(trial_seed(42, 7), trial_seed(42, 7));
  EXPECT_NE(trial_seed(42, 7), trial_seed(42, 8));
  EXPECT_NE(trial_seed(42, 7), trial_seed(43, 7));
  // Reference value of splitmix64 from its published test vector.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Sampler, SameSeedSameTrace) {
  auto p = load_product("iterator.model");
  Simulator sim(p);
  auto a = sim.sample_run(9, 50), b = sim.sample_run(9, 50);
  ASSERT_TRUE(a.ensure(50) && b.ensure(50));
  EXPECT_EQ(a.letters(), b.letters());
  EXPECT_FALSE(a.ensure(51));
}

TEST(Sampler, FirstLetterFrequencies) {
  auto p = load_product("procrastinate_loop.model");
  Simulator sim(p);
  const int n = 30000;
  std::vector<int> count(p.num_letters());
  for (int i = 0; i < n; ++i) {
    auto t = sim.sample_run(trial_seed(1, i), 1);
    t.ensure(1);
    ++count[t.letters()[0]];
  }
  const double se = std::sqrt((1.0 / 3) * (2.0 / 3) / n);
  for (int c : count) EXPECT_NEAR(double(c) / n, 1.0 / 3, 5 * se);
}

TEST(Policies, OneSkipMonitorOnFirstExample) {
  auto p = load_product("procrastinate.model");
  NonHiddenAnalysis nh(p);
  auto pol = Policy::monitor("pro", compile_monitor(nh, 1), p);
  Simulator sim(p);
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto t = sim.sample_run(trial_seed(5, i), 100);
    auto o = sim.run(t, pol);
    EXPECT_EQ(o.observations, 1u);
    ASSERT_NE(o.verdict, Verdict::Undecided);
    EXPECT_EQ(o.verdict == Verdict::Yes, p.letter_name(t.letters()[1]) == "a");
    EXPECT_TRUE(sim.verdict_correct(t, o));
  }
}

TEST(Policies, SmartStopsAtFirstB) {
  auto p = load_product("diag_hidden.model");
  Simulator sim(p);
  auto b = *p.mc().letters().find("b");
  int seen = 0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    auto t = sim.sample_run(trial_seed(6, i), 60);
    auto o = sim.run(t, Policy::smart());
    t.ensure(60);
    const auto& w = t.letters();
    auto first_b = std::find(w.begin(), w.end(), b);
    if (first_b == w.end()) {
      EXPECT_EQ(o.verdict, Verdict::Undecided);
      continue;
    }
    ++seen;
    EXPECT_EQ(o.verdict, Verdict::Yes);
    EXPECT_EQ(o.stop, std::uint64_t(first_b - w.begin()) + 1);
  }
  EXPECT_GT(seen, 0);
}

TEST(Policies, ShortTraceIsUndecided) {
  auto p = load_product("procrastinate.model");
  NonHiddenAnalysis nh(p);
  auto pol = Policy::monitor("pro", compile_monitor(nh, 1), p);
  Simulator sim(p);
  auto t = sim.sample_run(1, 1);
  auto o = sim.run(t, pol);
  EXPECT_EQ(o.verdict, Verdict::Undecided);
  EXPECT_TRUE(o.truncated);
}

TEST(Policies, MonitorModelMismatch) {
  auto p = load_product("procrastinate.model");
  auto other = load_product("iterator.model");
  NonHiddenAnalysis nh(p);
  EXPECT_THROW(Policy::monitor("pro", compile_monitor(nh, 1), other), ValidationError);
}

TEST(Simulate, EmptyPolicyList) {
  auto p = load_product("procrastinate.model");
  Simulator sim(p);
  auto r = sim.simulate({}, 10, 1, 10);
  EXPECT_TRUE(r.policies.empty());
  EXPECT_EQ(r.to_json()["policies"].size(), 0u);
}

TEST(Simulate, JsonShape) {
  auto p = load_product("procrastinate_loop.model");
  Simulator sim(p);
  auto j = sim.simulate({Policy::seeall(), Policy::smart()}, 50, 3, 100).to_json();
  EXPECT_EQ(j["trials"], 50);
  EXPECT_EQ(j["seed"], 3);
  ASSERT_EQ(j["policies"].size(), 2u);
  for (const auto& pj : j["policies"]) {
    for (const char* key : {"name", "mean_cost", "stddev", "undecided", "decided", "verdicts", "incorrect"}) {
      EXPECT_TRUE(pj.contains(key)) << key;
    }
    EXPECT_TRUE(pj["verdicts"].contains("yes") && pj["verdicts"].contains("no"));
  }
}

TEST(Simulate, HiddenSmartDecidesHalfTheTime) {
  auto p = load_product("diag_hidden.model");
  Simulator sim(p);
  const std::uint64_t n = 10000;
  auto r = sim.simulate({Policy::smart()}, n, 77, 200);
  const auto& s = r.policies[0];
  double f = s.decision_frequency();
  EXPECT_NEAR(f, 0.5, 5 * std::sqrt(0.25 / n));
  EXPECT_EQ(s.incorrect, 0u);
}

TEST(Simulate, MonitorMeanMatchesAnalyticCost) {
  auto p = load_product("iterator.model");
  NonHiddenAnalysis nh(p);
  auto exact = expected_pro_cost(nh, 2).to_double();
  Simulator sim(p);
  auto r = sim.simulate({Policy::monitor("pro", compile_monitor(nh, 2), p)}, 20000, 8, 10000);
  const auto& s = r.policies[0];
  EXPECT_EQ(s.incorrect, 0u);
  EXPECT_EQ(s.truncated, 0u);
  EXPECT_NEAR(s.mean_cost(), exact, 5 * s.standard_error());
}

TEST(Simulate, DominanceAndCorrectnessOnRandomModels) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 40; ++i) {
    auto p = random_product(rng, nonhidden_spec(), 20);
    NonHiddenAnalysis nh(p);
    Simulator sim(p);
    std::vector<Policy> pols{Policy::seeall(), Policy::smart(), Policy::monitor("pro4", compile_monitor(nh, 4), p)};
    for (std::uint64_t t = 0; t < 100; ++t) {
      auto trace = sim.sample_run(trial_seed(i, t), 400);
      auto all = sim.run(trace, pols[0]);
      for (std::size_t k = 1; k < pols.size(); ++k) {
        auto o = sim.run(trace, pols[k]);
        EXPECT_TRUE(sim.verdict_correct(trace, o));
        if (o.verdict == Verdict::Undecided) continue;
        EXPECT_EQ(all.verdict, o.verdict) << "model " << i << " policy " << pols[k].name();
        EXPECT_LE(all.stop, o.stop);
      }
    }
  }
}
