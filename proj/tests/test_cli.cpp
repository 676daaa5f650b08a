#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "json.hpp"
#include "selmon/batch.hpp"
#include "selmon/cli.hpp"
#include "selmon/generate.hpp"
#include "selmon/properties.hpp"
#include "support/fixtures.hpp"

using namespace selmon;
using testing_support::model_path;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "selmon");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("selmon_test_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(Cli, Validate) {
  EXPECT_EQ(run({"validate", model_path("iterator.model")}).code, 0);
  auto bad = temp_file("bad.model", "[mc]\ninitial s\ntrans s a 1/2 s\n[dfa]\ninitial q\naccepting f\ntrans q a f\n");
  auto r = run({"validate", bad});
  EXPECT_EQ(r.code, cli::kInput);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"validate", "/nonexistent/x.model"}).code, cli::kInput);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run({"compile", model_path("procrastinate.model")}).code, cli::kUsage);
}

TEST(Cli, AnalyzeJson) {
  auto r = run({"analyze", model_path("diag_hidden.model"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["diagnosable"], false);
  EXPECT_EQ(j["cinf_finite"], false);
}

TEST(Cli, Classify) {
  auto r = run({"--json", "classify", model_path("diag_hidden.model"), "--prefix", "_,b"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["positively_deciding"], true);
  EXPECT_EQ(run({"classify", model_path("diag_hidden.model"), "--prefix", "zz"}).code, cli::kInput);
}

TEST(Cli, CompileAndSimulateMonitor) {
  auto mon = (std::filesystem::temp_directory_path() / "selmon_test_k1.monitor").string();
  ASSERT_EQ(run({"compile", model_path("procrastinate.model"), "-K", "1", "-o", mon}).code, 0);
  auto r = run({"simulate", model_path("procrastinate.model"), "--monitor", mon, "--trials", "100", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  bool found = false;
  for (const auto& pj : j["policies"]) {
    EXPECT_EQ(pj["incorrect"], 0);
    if (pj["mean_cost"].is_number() && pj["undecided"] == 0 && pj["mean_cost"] == 1.0) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(Cli, CompileUnboundedNeedsFiniteCras) {
  EXPECT_EQ(run({"compile", model_path("procrastinate_loop.model"), "-K", "inf"}).code, cli::kCapability);
  EXPECT_EQ(run({"compile", model_path("procrastinate.model"), "-K", "inf"}).code, 0);
  EXPECT_EQ(run({"compile", model_path("diag_hidden.model"), "-K", "2"}).code, cli::kCapability);
}

TEST(Cli, Cost) {
  auto r = run({"cost", model_path("procrastinate_loop.model"), "--k-sweep", "0,1,2", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["cinf"]["value"], "1/1");
  EXPECT_EQ(run({"cost", model_path("diag_hidden.model")}).code, cli::kCapability);
  EXPECT_EQ(run({"cost", model_path("diag_hidden.model"), "--see-all-only"}).code, 0);
}

TEST(Cli, CapacityLimit) {
  EXPECT_EQ(run({"--max-nodes", "2", "analyze", model_path("iterator.model")}).code, cli::kCapacity);
}

TEST(Cli, GenIsDeterministic) {
  auto a = run({"gen", "--states", "5", "--seed", "12"});
  auto b = run({"gen", "--states", "5", "--seed", "12"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NO_THROW(load_model(a.out));
  EXPECT_NE(a.out, run({"gen", "--states", "5", "--seed", "13"}).out);
}

TEST(Cli, Batch) {
  auto r = run({"batch", "--count", "10", "--name", "demo"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("GAvg"), std::string::npos);
  EXPECT_NE(r.out.find("demo"), std::string::npos);
}

TEST(Generate, DirichletWeightsSumToScale) {
  std::mt19937_64 rng(1);
  for (std::size_t n = 1; n < 8; ++n) {
    auto w = dirichlet_weights(n, 0.3, rng);
    std::uint64_t total = 0;
    for (auto x : w) {
      EXPECT_GE(x, 1u);
      total += x;
    }
    EXPECT_EQ(total, std::uint64_t(1) << 32);
  }
}

TEST(Generate, LargeConcentrationGivesNearUniformRows) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    auto w = dirichlet_weights(2, 1e6, rng);
    double first = double(w[0]) / double(std::uint64_t(1) << 32);
    ASSERT_NEAR(first, 0.5, 0.01);
  }
}

TEST(Generate, ModelsAreValidAndNonHidden) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GenSpec spec;
    spec.states = 2 + seed % 6;
    spec.out_degree = 1 + seed % spec.states;
    spec.seed = seed;
    spec.sinks = seed % 2;
    auto m = load_model(generate_model(spec));
    EXPECT_TRUE(is_non_hidden(m.mc));
    EXPECT_EQ(m.mc.num_states(), spec.states);
    EXPECT_TRUE(diagnoser_exists(ProductMc(m.mc, m.dfa)));
    spec.non_hidden = false;
    spec.letters = 3;
    EXPECT_NO_THROW(load_model(generate_model(spec)));
  }
  GenSpec bad;
  bad.out_degree = 99;
  EXPECT_THROW(generate_model(bad), ValidationError);
}

TEST(Generate, Flowgraph) {
  auto f = load_flowgraph("[flowgraph]\nentry v0\nedge v0 hasNext v1\nedge v1 next v0\nedge v1 next v2\nedge v0 other v2\n");
  EXPECT_EQ(f.vertices.size(), 3u);
  auto m = load_model(flowgraph_model(f, 1.0, 4, "iterator"));
  EXPECT_EQ(m.mc.states().name(m.mc.initial()), "v0");
  EXPECT_TRUE(m.mc.letters().find("quiet"));
  EXPECT_THROW(load_flowgraph("[flowgraph]\nedge a b c\n"), ParseError);
}

TEST(Properties, Iterator) {
  auto d = iterator_property({"hasNext", "next", "other"});
  auto w = [&](std::vector<LetterId> v) { return d.run(v, d.initial()) == d.accepting(); };
  EXPECT_FALSE(w({0, 1, 0, 1}));
  EXPECT_TRUE(w({0, 1, 1}));
  EXPECT_TRUE(w({1, 2, 1}));
  EXPECT_THROW(iterator_property({"a"}), ValidationError);
}

TEST(Properties, ReachAndParity) {
  auto r = builtin_property("reach_letter(b)", {"a", "b"});
  EXPECT_TRUE(r.run({0, 0, 1}, r.initial()) == r.accepting());
  EXPECT_FALSE(r.run({0, 0}, r.initial()) == r.accepting());
  auto p = builtin_property("parity_position(a,2)", {"a", "b"});
  auto acc = [&](std::vector<LetterId> v) { return p.run(v, p.initial()) == p.accepting(); };
  EXPECT_FALSE(acc({0}));        // position 0 does not count
  EXPECT_FALSE(acc({1, 0}));     // position 1 is odd
  EXPECT_TRUE(acc({1, 1, 0}));   // position 2
  EXPECT_FALSE(acc({1, 0, 1, 1}));
  EXPECT_THROW(builtin_property("nope", {"a"}), ValidationError);
}

TEST(Batch, RatiosInUnitInterval) {
  GenSpec spec;
  spec.states = 5;
  auto r = batch_experiment(spec, 30);
  EXPECT_EQ(r.entries.size(), 30u);
  EXPECT_TRUE(r.ratios_in_unit_interval());
  EXPECT_GT(r.median_ratio(), 0.0);
  EXPECT_LE(r.geometric_mean_ratio(), 1.0);
}
