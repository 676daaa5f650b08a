#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "json.hpp"

#include "selmon/belief.hpp"
#include "selmon/error.hpp"
#include "selmon/nonhidden.hpp"
#include "selmon/qualitative.hpp"

namespace selmon {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of trial i, computable without running trials 0..i-1.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t i) { return splitmix64(master ^ splitmix64(i)); }

/// Draws successors with exact thresholds: edge i is taken when a uniform
/// 64-bit X satisfies T_{i-1} <= X < T_i, T_i = ceil(cum_i * 2^64).
class TraceSampler {
 public:
  explicit TraceSampler(const ProductMc& p) : p_(p) {
    thresholds_.resize(p.num_pairs());
    const mpz_class scale = mpz_class(1) << 64;
    for (PairId x = 0; x < p.num_pairs(); ++x) {
      Rational cum(0);
      for (const auto& e : p.out(x)) {
        cum += e.probability;
        mpz_class num = cum.numerator() * scale;
        mpz_class t;
        mpz_cdiv_q(t.get_mpz_t(), num.get_mpz_t(), cum.denominator().get_mpz_t());
        unsigned __int128 v = 0;
        for (int limb = 1; limb >= 0; --limb) {
          mpz_class part = (t >> (64 * limb)) & mpz_class("18446744073709551615");
          v = (v << 64) | static_cast<unsigned __int128>(mpz_get_ui(part.get_mpz_t()));
        }
        thresholds_[x].push_back(v);
      }
    }
  }

  const ProductMc& product() const { return p_; }

  /// Index into p.out(x) chosen by the 64-bit draw.
  std::size_t pick(PairId x, std::uint64_t draw) const {
    const auto& t = thresholds_[x];
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (static_cast<unsigned __int128>(draw) < t[i]) return i;
    }
    throw std::logic_error("row of pair " + p_.pair_name(x) + " does not sum to one");
  }

 private:
  const ProductMc& p_;
  std::vector<std::vector<unsigned __int128>> thresholds_;
};

/// A sampled run, extended lazily up to `max_steps` letters. pairs()[i] is
/// the hidden product pair before letter i.
class RunTrace {
 public:
  RunTrace(const TraceSampler& sampler, std::uint64_t seed, std::uint64_t max_steps)
      : sampler_(&sampler), rng_(seed), max_steps_(max_steps) {
    if (max_steps == 0) throw std::invalid_argument("max_steps must be at least 1");
    pairs_.push_back(sampler.product().initial());
  }

  /// Makes at least n letters available; false if n exceeds max_steps.
  bool ensure(std::uint64_t n) {
    if (n > max_steps_) return false;
    const auto& p = sampler_->product();
    while (letters_.size() < n) {
      PairId x = pairs_.back();
      const auto& e = p.out(x)[sampler_->pick(x, rng_())];
      letters_.push_back(e.letter);
      pairs_.push_back(e.target);
    }
    return true;
  }

  const std::vector<LetterId>& letters() const { return letters_; }
  const std::vector<PairId>& pairs() const { return pairs_; }
  std::uint64_t max_steps() const { return max_steps_; }

 private:
  const TraceSampler* sampler_;
  std::mt19937_64 rng_;
  std::uint64_t max_steps_;
  std::vector<LetterId> letters_;
  std::vector<PairId> pairs_;
};

enum class Verdict { Yes, No, Undecided };

inline const char* to_string(Verdict v) {
  return v == Verdict::Yes ? "yes" : v == Verdict::No ? "no" : "undecided";
}

struct PolicyOutcome {
  Verdict verdict = Verdict::Undecided;
  std::uint64_t observations = 0;
  std::uint64_t stop = 0;  // letters elapsed when the policy stopped
  bool truncated = false;
};

/// see-all, light see-all (smart), or a compiled monitor resolved against a model.
class Policy {
 public:
  enum class Kind { SeeAll, Smart, Monitor };

  static Policy seeall() { return Policy(Kind::SeeAll, "seeall"); }
  static Policy smart() { return Policy(Kind::Smart, "smart"); }
  static Policy monitor(std::string name, const MonitorTable& table, const ProductMc& p) {
    Policy pol(Kind::Monitor, std::move(name));
    const std::size_t l = p.num_letters();
    pol.next_.assign(table.nodes.size() * l, kNone);
    for (std::size_t i = 0; i < table.nodes.size(); ++i) {
      const auto& n = table.nodes[i];
      if (!p.mc().states().find(n.mc_state) || !p.dfa().states().find(n.dfa_state)) {
        throw ValidationError("monitor node " + std::to_string(i) + " names pair " + n.mc_state + "," + n.dfa_state +
                              " which is not in the model");
      }
      pol.skip_.push_back(n.skip);
      pol.verdict_.push_back(n.verdict ? (*n.verdict ? Verdict::Yes : Verdict::No) : Verdict::Undecided);
      for (const auto& [a, t] : n.edges) {
        auto id = p.mc().letters().find(a);
        if (!id) throw ValidationError("monitor edge uses letter '" + a + "' which is not in the model");
        pol.next_[i * l + *id] = t;
      }
    }
    pol.start_ = table.start;
    pol.letters_ = l;
    return pol;
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  friend class Simulator;
  Policy(Kind k, std::string name) : kind_(k), name_(std::move(name)) {}

  Kind kind_;
  std::string name_;
  std::vector<std::uint64_t> skip_;
  std::vector<Verdict> verdict_;
  std::vector<std::uint32_t> next_;
  std::uint32_t start_ = 0;
  std::size_t letters_ = 0;
};

struct PolicyStats {
  std::string name;
  std::uint64_t decided = 0;
  std::uint64_t undecided = 0;
  std::uint64_t truncated = 0;
  std::uint64_t yes = 0;
  std::uint64_t no = 0;
  std::uint64_t incorrect = 0;
  std::uint64_t cost_samples = 0;  // runs that were not truncated
  mpz_class cost_sum = 0;
  mpz_class cost_sq_sum = 0;

  double mean_cost() const {
    return cost_samples ? mpq_class(cost_sum, cost_samples).get_d() : std::nan("");
  }
  /// Sample standard deviation.
  double stddev() const {
    if (cost_samples < 2) return 0.0;
    mpq_class n(cost_samples);
    mpq_class var = (mpq_class(cost_sq_sum) - mpq_class(cost_sum * cost_sum) / n) / (n - 1);
    return std::sqrt(var.get_d());
  }
  double standard_error() const { return cost_samples ? stddev() / std::sqrt(double(cost_samples)) : std::nan(""); }
  double decision_frequency() const { return double(decided) / double(decided + undecided); }
};

struct SimReport {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<PolicyStats> policies;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["trials"] = trials;
    j["seed"] = seed;
    j["policies"] = nlohmann::json::array();
    for (const auto& s : policies) {
      nlohmann::json pj;
      pj["name"] = s.name;
      pj["mean_cost"] = s.cost_samples ? nlohmann::json(s.mean_cost()) : nlohmann::json(nullptr);
      pj["stddev"] = s.stddev();
      pj["undecided"] = s.undecided;
      pj["decided"] = s.decided;
      pj["verdicts"] = {{"yes", s.yes}, {"no", s.no}};
      pj["incorrect"] = s.incorrect;
      pj["truncated"] = s.truncated;
      j["policies"].push_back(pj);
    }
    return j;
  }
};

/// Runs policies on sampled traces. Holds a belief analyzer whose memo
/// tables are shared by all runs; not thread-safe.
class Simulator {
 public:
  explicit Simulator(const ProductMc& p, AnalysisLimits limits = {}) : p_(p), sampler_(p), an_(p, limits) {}

  const ProductMc& product() const { return p_; }

  RunTrace sample_run(std::uint64_t seed, std::uint64_t max_steps) const { return RunTrace(sampler_, seed, max_steps); }

  PolicyOutcome run(RunTrace& trace, const Policy& pol) {
    return pol.kind() == Policy::Kind::Monitor ? run_monitor(trace, pol) : run_seeall(trace, pol.kind() == Policy::Kind::Smart);
  }

  /// A verdict is correct when the true pair at the stop has the matching
  /// polarity (not negatively / positively deciding) and the belief after
  /// the fully observed prefix is deciding with that polarity.
  bool verdict_correct(RunTrace& trace, const PolicyOutcome& o) {
    if (o.verdict == Verdict::Undecided) return true;
    PairId truth = trace.pairs().at(o.stop);
    auto id = belief_id(trace, o.stop);
    const auto& b = an_.belief(id);
    if (o.verdict == Verdict::Yes) {
      return an_.pair_class(truth) != PairClass::NegativelyDeciding && !b.empty() && an_.positively_deciding(b);
    }
    return an_.pair_class(truth) != PairClass::PositivelyDeciding && !b.empty() && an_.negatively_deciding(b);
  }

  SimReport simulate(const std::vector<Policy>& policies, std::uint64_t trials, std::uint64_t seed,
                     std::uint64_t max_steps) {
    if (trials == 0) throw std::invalid_argument("trials must be at least 1");
    SimReport r;
    r.trials = trials;
    r.seed = seed;
    for (const auto& pol : policies) r.policies.push_back(PolicyStats{pol.name()});
    for (std::uint64_t i = 0; i < trials; ++i) {
      RunTrace trace = sample_run(trial_seed(seed, i), max_steps);
      for (std::size_t k = 0; k < policies.size(); ++k) {
        auto o = run(trace, policies[k]);
        auto& s = r.policies[k];
        if (o.verdict == Verdict::Undecided) {
          ++s.undecided;
        } else {
          ++s.decided;
          ++(o.verdict == Verdict::Yes ? s.yes : s.no);
          if (!verdict_correct(trace, o)) ++s.incorrect;
        }
        if (o.truncated) {
          ++s.truncated;
        } else {
          ++s.cost_samples;
          s.cost_sum += o.observations;
          s.cost_sq_sum += mpz_class(o.observations) * o.observations;
        }
      }
    }
    return r;
  }

  BeliefAnalyzer& analyzer() { return an_; }

 private:
  BeliefAnalyzer::BeliefId belief_id(RunTrace& trace, std::uint64_t n) {
    auto id = an_.intern(an_.initial_belief());
    for (std::uint64_t i = 0; i < n; ++i) id = an_.successor(id, trace.letters()[i]);
    return id;
  }

  PolicyOutcome run_seeall(RunTrace& trace, bool stop_when_very_confused) {
    PolicyOutcome o;
    auto id = an_.intern(an_.initial_belief());
    for (std::uint64_t i = 0;; ++i) {
      const auto& b = an_.belief(id);
      if (an_.deciding(id)) {
        o.verdict = an_.positively_deciding(b) ? Verdict::Yes : Verdict::No;
        o.stop = i;
        return o;
      }
      if (stop_when_very_confused && an_.very_confused(id)) {
        o.stop = i;
        return o;
      }
      if (!trace.ensure(i + 1)) {
        o.stop = i;
        o.truncated = true;
        return o;
      }
      ++o.observations;
      id = an_.successor(id, trace.letters()[i]);
    }
  }

  PolicyOutcome run_monitor(RunTrace& trace, const Policy& pol) {
    PolicyOutcome o;
    std::uint32_t node = pol.start_;
    std::uint64_t pos = 0;
    while (pol.verdict_[node] == Verdict::Undecided) {
      std::uint64_t at = pos + pol.skip_[node];
      if (!trace.ensure(at + 1)) {
        o.stop = pos;
        o.truncated = true;
        return o;
      }
      ++o.observations;
      LetterId a = trace.letters()[at];
      auto next = pol.next_[node * pol.letters_ + a];
      if (next == kNone) {
        throw Error("monitor has no edge for letter '" + p_.letter_name(a) + "' at node " + std::to_string(node) +
                    "; monitor and model are incompatible");
      }
      node = next;
      pos = at + 1;
    }
    o.verdict = pol.verdict_[node];
    o.stop = pos;
    return o;
  }

  const ProductMc& p_;
  TraceSampler sampler_;
  BeliefAnalyzer an_;
};

}  // namespace selmon
