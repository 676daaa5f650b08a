#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "selmon/error.hpp"
#include "selmon/model.hpp"

namespace selmon {

/// Index of a product pair (s,q); pairs are ordered by (state, dfa-state).
using PairId = std::uint32_t;

struct ProductEdge {
  LetterId letter;
  PairId target;
  Rational probability;
};

/// The composition M x A. Every pair of S x Q is present, reachable or not.
class ProductMc {
 public:
  ProductMc(Mc mc, Dfa dfa) : mc_(std::move(mc)), dfa_(std::move(dfa)) {
    const auto& dl = dfa_.letters();
    if (dl.size() != mc_.num_letters()) throw ValidationError("alphabet mismatch between MC and DFA");
    std::vector<LetterId> remap(mc_.num_letters());
    for (LetterId a = 0; a < mc_.num_letters(); ++a) {
      auto it = std::find(dl.begin(), dl.end(), mc_.letters().name(a));
      if (it == dl.end()) throw ValidationError("alphabet mismatch: DFA has no letter '" + mc_.letters().name(a) + "'");
      remap[a] = static_cast<LetterId>(it - dl.begin());
    }
    const std::size_t nq = dfa_.num_states();
    out_.resize(mc_.num_states() * nq);
    for (StateId s = 0; s < mc_.num_states(); ++s) {
      for (DfaStateId q = 0; q < nq; ++q) {
        auto& row = out_[pair(s, q)];
        for (const auto& t : mc_.out(s)) {
          row.push_back({t.letter, pair(t.target, dfa_.next(q, remap[t.letter])), t.probability});
        }
      }
    }
    remap_ = std::move(remap);
  }

  const Mc& mc() const { return mc_; }
  const Dfa& dfa() const { return dfa_; }

  std::size_t num_pairs() const { return out_.size(); }
  std::size_t num_letters() const { return mc_.num_letters(); }
  PairId initial() const { return pair(mc_.initial(), dfa_.initial()); }
  PairId pair(StateId s, DfaStateId q) const { return static_cast<PairId>(s * dfa_.num_states() + q); }
  StateId state_of(PairId p) const { return static_cast<StateId>(p / dfa_.num_states()); }
  DfaStateId dfa_state_of(PairId p) const { return static_cast<DfaStateId>(p % dfa_.num_states()); }
  bool is_accepting(PairId p) const { return dfa_state_of(p) == dfa_.accepting(); }

  /// Nonzero entries M'(a)((s,q),.) for all letters, sorted by (letter, target).
  const std::vector<ProductEdge>& out(PairId p) const { return out_.at(p); }

  /// DFA successor of q on an MC letter.
  DfaStateId dfa_next(DfaStateId q, LetterId a) const { return dfa_.next(q, remap_[a]); }

  Rational probability(LetterId a, PairId from, PairId to) const {
    for (const auto& e : out_.at(from)) {
      if (e.letter == a && e.target == to) return e.probability;
    }
    return Rational(0);
  }

  std::string pair_name(PairId p) const {
    return mc_.states().name(state_of(p)) + "," + dfa_.states().name(dfa_state_of(p));
  }
  const std::string& letter_name(LetterId a) const { return mc_.letters().name(a); }

 private:
  Mc mc_;
  Dfa dfa_;
  std::vector<LetterId> remap_;
  std::vector<std::vector<ProductEdge>> out_;
};

inline ProductMc compose(const Mc& mc, const Dfa& dfa) { return ProductMc(mc, dfa); }

/// Pairs reachable from `from` along positive-probability edges, in BFS order.
inline std::vector<PairId> reachable_pairs(const ProductMc& p, PairId from) {
  std::vector<char> seen(p.num_pairs(), 0);
  std::vector<PairId> order{from};
  seen[from] = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& e : p.out(order[i])) {
      if (!seen[e.target]) {
        seen[e.target] = 1;
        order.push_back(e.target);
      }
    }
  }
  return order;
}

}  // namespace selmon
