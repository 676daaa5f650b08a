#pragma once

// Randomized cross-checks shared by the unit tests and the acceptance
// binary. Each returns the number of disagreements and fills `detail` with
// the first one.

#include <cstdint>
#include <random>
#include <string>

#include "selmon/cost.hpp"
#include "selmon/nonhidden.hpp"
#include "selmon/qualitative.hpp"
#include "support/oracles.hpp"
#include "support/random_models.hpp"

namespace testing_support {

/// How much a randomized check exercised: items compared and how many of
/// them had the interesting polarity (confused, or a non-deciding start).
struct CheckStats {
  std::size_t checked = 0;
  std::size_t interesting = 0;
};

/// Random model whose product has at most `max_pairs` pairs.
inline selmon::ProductMc random_product(std::mt19937_64& rng, const RandomModelSpec& spec, std::size_t max_pairs) {
  while (true) {
    auto m = random_model(rng, spec);
    if (m.mc.num_states() * m.dfa.num_states() <= max_pairs) return selmon::ProductMc(std::move(m.mc), std::move(m.dfa));
  }
}

inline RandomModelSpec nonhidden_spec() {
  RandomModelSpec spec;
  spec.max_states = 5;
  spec.max_dfa_states = 3;  // plus the accepting state: at most 4
  spec.max_degree = 3;
  spec.non_hidden = true;
  return spec;
}

/// Random non-hidden model whose initial pair is not yet deciding.
inline selmon::ProductMc nontrivial_nonhidden(std::mt19937_64& rng) {
  while (true) {
    auto p = random_product(rng, nonhidden_spec(), 20);
    if (selmon::classify_pairs(p)[p.initial()] == selmon::PairClass::Undecided) return p;
  }
}

/// Every subset of S x Q: the library's confused / very confused / finitary
/// against the brute-force oracle.
inline std::size_t belief_oracle_disagreements(std::size_t models, std::uint64_t seed, std::string& detail,
                                               CheckStats* stats = nullptr) {
  std::mt19937_64 rng(seed);
  RandomModelSpec spec;
  spec.max_states = 3;
  spec.max_letters = 2;
  spec.max_dfa_states = 2;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < models; ++i) {
    auto p = random_product(rng, spec, 6);
    Reference ref(p.mc(), p.dfa());
    selmon::BeliefAnalyzer an(p);
    const std::size_t n = p.num_pairs();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<selmon::PairId> v;
      for (selmon::PairId x = 0; x < n; ++x) {
        if (mask >> x & 1) v.push_back(x);
      }
      selmon::Belief b(v);
      auto rb = to_ref(p, b);
      bool c = an.is_confused(b), vc = an.is_very_confused(b), fin = an.is_finitary(b);
      bool rc = ref.confused(rb), rvc = ref.very_confused(rb), rfin = ref.finitary(rb);
      if (stats) ++stats->checked, stats->interesting += rc;
      if (c != rc || vc != rvc || fin != rfin) {
        if (bad++ == 0) {
          detail = "model " + std::to_string(i) + " belief " + selmon::belief_to_string(p, b) + ": confused " +
                   std::to_string(c) + "/" + std::to_string(rc) + " very_confused " + std::to_string(vc) + "/" +
                   std::to_string(rvc) + " finitary " + std::to_string(fin) + "/" + std::to_string(rfin);
        }
      }
    }
  }
  return bad;
}

/// Reachable beliefs (under letters and skips) from B0, up to `cap` of them.
inline std::vector<selmon::Belief> reachable_beliefs(const selmon::ProductMc& p, std::size_t cap) {
  selmon::BeliefNfa nfa(p);
  std::vector<selmon::Belief> out{selmon::Belief{p.initial()}};
  std::set<selmon::Belief> seen(out.begin(), out.end());
  for (std::size_t i = 0; i < out.size() && out.size() < cap; ++i) {
    std::vector<selmon::Observation> obs{selmon::Observation::skip()};
    for (selmon::LetterId a = 0; a < p.num_letters(); ++a) obs.push_back(selmon::Observation::letter(a));
    for (auto o : obs) {
      auto b = nfa.step(out[i], o);
      if (!b.empty() && seen.insert(b).second) out.push_back(b);
    }
  }
  return out;
}

/// confused_nonhidden against the general is_confused on reachable beliefs
/// of size <= 3.
inline std::size_t nonhidden_confusion_disagreements(std::size_t models, std::uint64_t seed, std::string& detail,
                                                     CheckStats* stats = nullptr) {
  std::mt19937_64 rng(seed);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < models; ++i) {
    auto p = nontrivial_nonhidden(rng);
    selmon::NonHiddenAnalysis nh(p);
    selmon::BeliefAnalyzer an(p);
    for (const auto& b : reachable_beliefs(p, 100000)) {
      if (b.size() > 3) continue;
      bool fast = selmon::confused_nonhidden(b, nh), general = an.is_confused(b);
      if (stats) ++stats->checked, stats->interesting += general;
      if (fast != general && bad++ == 0) {
        detail = "model " + std::to_string(i) + " belief " + selmon::belief_to_string(p, b) + ": nonhidden " +
                 std::to_string(fast) + " general " + std::to_string(general);
      }
    }
  }
  return bad;
}

/// cinf <= pro(K) for the sweep, cinf <= smart, |pro(64) - cinf| <= 2^-10.
inline std::size_t optimality_violations(std::size_t models, std::uint64_t seed, std::string& detail,
                                         CheckStats* stats = nullptr) {
  std::mt19937_64 rng(seed);
  const selmon::Rational eps = selmon::Rational(1) / selmon::Rational(1024);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < models; ++i) {
    auto p = nontrivial_nonhidden(rng);
    selmon::NonHiddenAnalysis nh(p);
    auto cinf = selmon::compute_cinf(nh);
    if (stats) ++stats->checked, stats->interesting += !nh.deciding(p.initial());
    auto smart = selmon::expected_smart_cost(p);
    std::string why;
    if (!(selmon::ExtRational(cinf) <= smart)) why = "cinf " + cinf.str() + " > smart " + smart.str();
    for (auto k : selmon::default_k_sweep()) {
      auto pro = selmon::expected_pro_cost(nh, k);
      if (pro < cinf) why = "pro(" + std::to_string(k) + ") " + pro.str() + " < cinf " + cinf.str();
      if (k == 64) {
        auto d = pro - cinf;
        if (d.sign() < 0) d = -d;
        if (d > eps) why = "pro(64) " + pro.str() + " far from cinf " + cinf.str();
      }
    }
    if (!why.empty() && bad++ == 0) detail = "model " + std::to_string(i) + ": " + why;
  }
  return bad;
}

}  // namespace testing_support
