#pragma once

// Reference implementations used only by the tests. They work on the raw
// Mc/Dfa, use their own belief representation and solve probabilities
// exactly with plain Gauss-Jordan elimination over mpq_class.

#include <cstdint>
#include <map>
#include <algorithm>
#include <optional>
#include <stdexcept>
#include <set>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "selmon/model.hpp"
#include "selmon/product.hpp"

namespace testing_support {

using Pair = std::pair<std::uint32_t, std::uint32_t>;  // (mc state, dfa state)
using RefBelief = std::set<Pair>;

/// Solves A x = b by Gauss-Jordan with partial search for a nonzero pivot.
inline std::vector<mpq_class> gauss_jordan(std::vector<std::vector<mpq_class>> a, std::vector<mpq_class> b) {
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw std::domain_error("singular");
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    mpq_class inv = 1 / a[c][c];
    for (std::size_t j = 0; j < n; ++j) a[c][j] *= inv;
    b[c] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      mpq_class f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  return b;
}

class Reference {
 public:
  Reference(const selmon::Mc& mc, const selmon::Dfa& dfa) : mc_(mc), dfa_(dfa) {
    for (selmon::LetterId a = 0; a < mc.num_letters(); ++a) {
      const auto& dl = dfa.letters();
      dfa_letter_.push_back(static_cast<selmon::LetterId>(
          std::find(dl.begin(), dl.end(), mc.letters().name(a)) - dl.begin()));
    }
    compute_acceptance();
  }

  std::uint32_t dfa_next(std::uint32_t q, selmon::LetterId a) const { return dfa_.next(q, dfa_letter_[a]); }

  /// Exact Pr_s(L_q).
  const mpq_class& acceptance(Pair x) const { return acc_.at(x); }
  bool negative(Pair x) const { return acc_.at(x) == 0; }
  bool positive(Pair x) const { return acc_.at(x) == 1; }

  bool deciding(const RefBelief& b) const {
    if (b.empty()) return true;
    bool all_pos = true, all_neg = true;
    for (const auto& x : b) {
      all_pos &= positive(x);
      all_neg &= negative(x);
    }
    return all_pos || all_neg;
  }

  /// Letter step; `letter == nullopt` is a skip.
  RefBelief step(const RefBelief& b, std::optional<selmon::LetterId> letter) const {
    RefBelief out;
    for (const auto& [s, q] : b) {
      for (const auto& t : mc_.out(s)) {
        if (letter && t.letter != *letter) continue;
        out.insert({t.target, dfa_next(q, t.letter)});
      }
    }
    return out;
  }

  std::size_t num_pairs() const { return mc_.num_states() * dfa_.num_states(); }

  /// Very confused: no word u with |u| <= 2^{|SxQ|} makes the belief nonempty
  /// and deciding. Enumerates layer by layer the set of beliefs reached by
  /// words of each length.
  bool very_confused(const RefBelief& b) const {
    const std::size_t bound = std::size_t(1) << num_pairs();
    std::set<RefBelief> layer{b};
    for (std::size_t len = 0; len <= bound; ++len) {
      std::set<RefBelief> next;
      for (const auto& x : layer) {
        if (!x.empty() && deciding(x)) return false;
        if (x.empty()) continue;
        for (selmon::LetterId a = 0; a < mc_.num_letters(); ++a) next.insert(step(x, a));
      }
      layer = std::move(next);
      if (layer.empty()) break;
    }
    return true;
  }

  /// Exact probability, from state s with belief b, that the observed
  /// belief eventually satisfies `target`.
  template <typename Target>
  mpq_class reach_probability(std::uint32_t s0, const RefBelief& b0, Target target) const {
    using Node = std::pair<std::uint32_t, RefBelief>;
    std::map<Node, std::size_t> id;
    std::vector<Node> nodes;
    auto visit = [&](const Node& n) {
      auto [it, fresh] = id.emplace(n, nodes.size());
      if (fresh) nodes.push_back(n);
      return it->second;
    };
    visit({s0, b0});
    std::vector<std::vector<std::pair<std::size_t, mpq_class>>> out;
    std::vector<char> is_target;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      Node n = nodes[i];
      is_target.push_back(target(n.second));
      out.emplace_back();
      if (is_target.back()) continue;
      for (const auto& t : mc_.out(n.first)) {
        auto j = visit({t.target, step(n.second, t.letter)});
        out[i].emplace_back(j, t.probability.raw());
      }
    }
    const std::size_t n = nodes.size();
    // Nodes that cannot reach a target have probability 0.
    std::vector<char> can(n, 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (can[i]) continue;
        bool c = is_target[i];
        for (const auto& [j, p] : out[i]) c = c || can[j];
        if (c) can[i] = 1, changed = true;
      }
    }
    std::vector<std::size_t> unknown, pos(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (can[i] && !is_target[i]) pos[i] = unknown.size(), unknown.push_back(i);
    }
    if (!can[0]) return 0;
    if (is_target[0]) return 1;
    const std::size_t m = unknown.size();
    std::vector<std::vector<mpq_class>> a(m, std::vector<mpq_class>(m, 0));
    std::vector<mpq_class> rhs(m, 0);
    for (std::size_t r = 0; r < m; ++r) {
      auto i = unknown[r];
      a[r][r] += 1;
      for (const auto& [j, p] : out[i]) {
        if (is_target[j]) {
          rhs[r] += p;
        } else if (can[j]) {
          a[r][pos[j]] -= p;
        }
      }
    }
    return gauss_jordan(a, rhs)[pos[0]];
  }

  bool confused(const RefBelief& b) const {
    for (const auto& [s, q] : b) {
      if (reach_probability(s, b, [&](const RefBelief& x) { return !x.empty() && deciding(x); }) < 1) return true;
    }
    return false;
  }

  bool finitary(const RefBelief& b) const {
    std::map<RefBelief, bool> vc;
    auto target = [&](const RefBelief& x) {
      if (x.empty()) return true;
      if (deciding(x)) return true;
      auto it = vc.find(x);
      if (it == vc.end()) it = vc.emplace(x, very_confused(x)).first;
      return it->second;
    };
    for (const auto& [s, q] : b) {
      if (reach_probability(s, b, target) < 1) return false;
    }
    return true;
  }

 private:
  void compute_acceptance() {
    const auto ns = mc_.num_states(), nq = dfa_.num_states();
    std::vector<Pair> all;
    for (std::uint32_t s = 0; s < ns; ++s) {
      for (std::uint32_t q = 0; q < nq; ++q) all.push_back({s, q});
    }
    auto idx = [&](Pair x) { return x.first * nq + x.second; };
    std::vector<char> can(all.size(), 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (auto x : all) {
        if (can[idx(x)]) continue;
        bool c = x.second == dfa_.accepting();
        for (const auto& t : mc_.out(x.first)) c = c || can[idx({t.target, dfa_next(x.second, t.letter)})];
        if (c) can[idx(x)] = 1, changed = true;
      }
    }
    std::vector<std::size_t> unknown, pos(all.size(), 0);
    for (auto x : all) {
      if (can[idx(x)] && x.second != dfa_.accepting()) pos[idx(x)] = unknown.size(), unknown.push_back(idx(x));
    }
    const std::size_t m = unknown.size();
    std::vector<std::vector<mpq_class>> a(m, std::vector<mpq_class>(m, 0));
    std::vector<mpq_class> rhs(m, 0);
    for (std::size_t r = 0; r < m; ++r) {
      Pair x = all[unknown[r]];
      a[r][r] += 1;
      for (const auto& t : mc_.out(x.first)) {
        Pair y{t.target, dfa_next(x.second, t.letter)};
        if (y.second == dfa_.accepting()) {
          rhs[r] += t.probability.raw();
        } else if (can[idx(y)]) {
          a[r][pos[idx(y)]] -= t.probability.raw();
        }
      }
    }
    auto sol = m ? gauss_jordan(a, rhs) : std::vector<mpq_class>{};
    for (auto x : all) {
      mpq_class v = 0;
      if (x.second == dfa_.accepting()) {
        v = 1;
      } else if (can[idx(x)]) {
        v = sol[pos[idx(x)]];
      }
      acc_[x] = v;
    }
  }

  const selmon::Mc& mc_;
  const selmon::Dfa& dfa_;
  std::vector<selmon::LetterId> dfa_letter_;
  std::map<Pair, mpq_class> acc_;
};

inline RefBelief to_ref(const selmon::ProductMc& p, const selmon::Belief& b) {
  RefBelief r;
  for (auto x : b) r.insert({p.state_of(x), p.dfa_state_of(x)});
  return r;
}

inline selmon::Belief from_ref(const selmon::ProductMc& p, const RefBelief& b) {
  std::vector<selmon::PairId> v;
  for (const auto& [s, q] : b) v.push_back(p.pair(s, q));
  return selmon::Belief(std::move(v));
}

}  // namespace testing_support
