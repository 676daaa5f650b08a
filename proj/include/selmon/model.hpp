#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "selmon/error.hpp"
#include "selmon/rational.hpp"

namespace selmon {

using StateId = std::uint32_t;
using LetterId = std::uint32_t;
using DfaStateId = std::uint32_t;

inline constexpr std::uint32_t kNone = static_cast<std::uint32_t>(-1);

/// Names interned to dense indices in first-seen order.
class Interner {
 public:
  std::uint32_t intern(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }
  std::optional<std::uint32_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct McTransition {
  LetterId letter;
  StateId target;
  Rational probability;
};

/// Labelled Markov chain. `out(s)` lists the nonzero entries M(a)(s,t) of
/// every letter, sorted by (letter, target). Immutable after construction.
class Mc {
 public:
  Mc(Interner states, Interner letters, StateId initial, std::vector<std::vector<McTransition>> out)
      : states_(std::move(states)), letters_(std::move(letters)), initial_(initial), out_(std::move(out)) {
    out_.resize(states_.size());
    for (auto& row : out_) {
      std::sort(row.begin(), row.end(), [](const McTransition& x, const McTransition& y) {
        return std::pair(x.letter, x.target) < std::pair(y.letter, y.target);
      });
      // Parallel edges are summed; zero entries dropped.
      std::vector<McTransition> merged;
      for (auto& t : row) {
        if (!merged.empty() && merged.back().letter == t.letter && merged.back().target == t.target) {
          merged.back().probability += t.probability;
        } else {
          merged.push_back(std::move(t));
        }
      }
      std::erase_if(merged, [](const McTransition& t) { return t.probability.is_zero(); });
      row = std::move(merged);
    }
    validate();
  }

  std::size_t num_states() const { return states_.size(); }
  std::size_t num_letters() const { return letters_.size(); }
  StateId initial() const { return initial_; }
  const Interner& states() const { return states_; }
  const Interner& letters() const { return letters_; }
  const std::vector<McTransition>& out(StateId s) const { return out_.at(s); }

  Rational probability(LetterId a, StateId from, StateId to) const {
    for (const auto& t : out_.at(from)) {
      if (t.letter == a && t.target == to) return t.probability;
    }
    return Rational(0);
  }

 private:
  void validate() const {
    if (initial_ >= states_.size()) throw ValidationError("initial state out of range");
    for (StateId s = 0; s < out_.size(); ++s) {
      Rational sum(0);
      for (const auto& t : out_[s]) {
        if (t.probability.sign() < 0 || t.probability > Rational(1)) {
          throw ValidationError("transition probability " + t.probability.str() + " from state '" + states_.name(s) +
                                "' outside [0,1]");
        }
        if (t.letter >= letters_.size() || t.target >= states_.size()) {
          throw ValidationError("transition from state '" + states_.name(s) + "' references an unknown letter or state");
        }
        sum += t.probability;
      }
      if (!sum.is_one()) {
        throw ValidationError("state '" + states_.name(s) + "' is not stochastic: outgoing probabilities sum to " +
                              sum.str());
      }
    }
  }

  Interner states_;
  Interner letters_;
  StateId initial_;
  std::vector<std::vector<McTransition>> out_;
};

/// DFA over an MC alphabet with exactly one accepting state, which is absorbing.
class Dfa {
 public:
  std::size_t num_states() const { return states_.size(); }
  std::size_t num_letters() const { return letters_.size(); }
  DfaStateId initial() const { return initial_; }
  DfaStateId accepting() const { return accepting_; }
  const Interner& states() const { return states_; }
  const std::vector<std::string>& letters() const { return letters_; }
  DfaStateId next(DfaStateId q, LetterId a) const { return delta_.at(q * letters_.size() + a); }

  /// Runs a finite word; returns the reached state.
  DfaStateId run(const std::vector<LetterId>& word, DfaStateId from) const {
    for (LetterId a : word) from = next(from, a);
    return from;
  }

  friend class DfaBuilder;

 private:
  Interner states_;
  std::vector<std::string> letters_;
  std::vector<DfaStateId> delta_;
  DfaStateId initial_ = 0;
  DfaStateId accepting_ = 0;
};

/// Collects a DFA over a fixed alphabet and normalizes it to a single
/// absorbing accepting state.
class DfaBuilder {
 public:
  explicit DfaBuilder(std::vector<std::string> letters) : letters_(std::move(letters)) {
    for (const auto& l : letters_) letter_index_.intern(l);
  }

  DfaStateId state(std::string_view name) {
    auto id = states_.intern(name);
    if (delta_.size() < states_.size() * letters_.size()) delta_.resize(states_.size() * letters_.size(), kNone);
    return id;
  }
  void set_initial(std::string_view name) { initial_ = state(name); }
  void add_accepting(std::string_view name) {
    auto id = state(name);
    if (std::find(accepting_.begin(), accepting_.end(), id) == accepting_.end()) accepting_.push_back(id);
  }
  /// Throws ValidationError on an unknown letter or a conflicting transition.
  void add_transition(std::string_view from, std::string_view letter, std::string_view to) {
    auto a = letter_index_.find(letter);
    if (!a) throw ValidationError("dfa letter '" + std::string(letter) + "' is not in the alphabet");
    auto q = state(from);
    auto r = state(to);
    auto& slot = delta_[q * letters_.size() + *a];
    if (slot != kNone && slot != r) {
      throw ValidationError("dfa is not deterministic: state '" + std::string(from) + "' has two '" +
                            std::string(letter) + "' successors");
    }
    slot = r;
  }

  Dfa build() const {
    if (initial_ == kNone) throw ValidationError("dfa has no initial state");
    const std::size_t n = letters_.size();
    Dfa dfa;
    dfa.letters_ = letters_;
    dfa.states_ = states_;
    dfa.delta_ = delta_;
    dfa.delta_.resize(states_.size() * n, kNone);
    dfa.initial_ = initial_;

    auto is_accepting = [&](DfaStateId q) {
      return std::find(accepting_.begin(), accepting_.end(), q) != accepting_.end();
    };
    auto make_absorbing = [&](DfaStateId f) {
      for (std::size_t a = 0; a < n; ++a) dfa.delta_[f * n + a] = f;
    };

    if (accepting_.size() == 1) {
      // A single accepting state is made absorbing; reach-once acceptance is unchanged.
      dfa.accepting_ = accepting_.front();
      make_absorbing(dfa.accepting_);
    } else {
      // Zero or several accepting states: add a fresh absorbing sink and
      // redirect every transition into an accepting state to it.
      std::string name = "accept";
      while (dfa.states_.find(name)) name += "_";
      DfaStateId sink = dfa.states_.intern(name);
      dfa.delta_.resize(dfa.states_.size() * n, kNone);
      for (auto& target : dfa.delta_) {
        if (target != kNone && is_accepting(target)) target = sink;
      }
      for (DfaStateId f : accepting_) make_absorbing(f);  // unreachable now, keep total
      if (is_accepting(dfa.initial_)) dfa.initial_ = sink;
      dfa.accepting_ = sink;
      make_absorbing(sink);
    }

    for (DfaStateId q = 0; q < dfa.states_.size(); ++q) {
      for (std::size_t a = 0; a < n; ++a) {
        if (dfa.delta_[q * n + a] == kNone) {
          throw ValidationError("dfa transition missing: state '" + dfa.states_.name(q) + "' on letter '" +
                                letters_[a] + "'");
        }
      }
    }
    return dfa;
  }

 private:
  std::vector<std::string> letters_;
  Interner letter_index_;
  Interner states_;
  std::vector<DfaStateId> delta_;
  std::vector<DfaStateId> accepting_;
  DfaStateId initial_ = kNone;
};

/// Target map of a non-hidden MC: for each letter a, the unique state <a>
/// that every a-transition enters (kNone for letters without transitions).
/// Empty optional when some letter enters two different states.
inline std::optional<std::vector<StateId>> non_hidden_targets(const Mc& mc) {
  std::vector<StateId> target(mc.num_letters(), kNone);
  for (StateId s = 0; s < mc.num_states(); ++s) {
    for (const auto& t : mc.out(s)) {
      if (target[t.letter] == kNone) {
        target[t.letter] = t.target;
      } else if (target[t.letter] != t.target) {
        return std::nullopt;
      }
    }
  }
  return target;
}

inline bool is_non_hidden(const Mc& mc) { return non_hidden_targets(mc).has_value(); }

}  // namespace selmon
