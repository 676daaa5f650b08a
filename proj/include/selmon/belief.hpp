#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "selmon/error.hpp"
#include "selmon/product.hpp"

namespace selmon {

/// A letter, or the skip symbol (spelled `_`), which is distinct from every letter.
class Observation {
 public:
  static Observation letter(LetterId a) { return Observation(a); }
  static Observation skip() { return Observation(kNone); }

  bool is_skip() const { return value_ == kNone; }
  LetterId letter_id() const { return value_; }

  friend bool operator==(Observation, Observation) = default;

 private:
  explicit Observation(std::uint32_t v) : value_(v) {}
  std::uint32_t value_;
};

/// Set of product pairs, kept sorted and duplicate free.
class Belief {
 public:
  Belief() = default;
  Belief(std::initializer_list<PairId> pairs) : pairs_(pairs) { normalize(); }
  explicit Belief(std::vector<PairId> pairs) : pairs_(std::move(pairs)) { normalize(); }

  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return pairs_.size(); }
  bool contains(PairId p) const { return std::binary_search(pairs_.begin(), pairs_.end(), p); }
  bool subset_of(const Belief& o) const {
    return std::includes(o.pairs_.begin(), o.pairs_.end(), pairs_.begin(), pairs_.end());
  }
  const std::vector<PairId>& pairs() const { return pairs_; }
  auto begin() const { return pairs_.begin(); }
  auto end() const { return pairs_.end(); }

  friend bool operator==(const Belief&, const Belief&) = default;
  friend auto operator<=>(const Belief&, const Belief&) = default;

 private:
  void normalize() {
    std::sort(pairs_.begin(), pairs_.end());
    pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
  }
  std::vector<PairId> pairs_;
};

struct BeliefHash {
  std::size_t operator()(const Belief& b) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (PairId p : b) {
      h ^= p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

/// The belief NFA: per pair and letter the successor set
/// {(s',delta(q,a)) | M(a)(s,s') > 0}; skip steps take the union over letters.
class BeliefNfa {
 public:
  explicit BeliefNfa(const ProductMc& p) : num_letters_(p.num_letters()) {
    succ_.resize(p.num_pairs() * num_letters_);
    skip_.resize(p.num_pairs());
    for (PairId x = 0; x < p.num_pairs(); ++x) {
      for (const auto& e : p.out(x)) {
        succ_[x * num_letters_ + e.letter].push_back(e.target);
        skip_[x].push_back(e.target);
      }
      for (LetterId a = 0; a < num_letters_; ++a) dedupe(succ_[x * num_letters_ + a]);
      dedupe(skip_[x]);
    }
  }

  std::size_t num_letters() const { return num_letters_; }
  std::size_t num_pairs() const { return skip_.size(); }

  const std::vector<PairId>& successors(PairId x, Observation o) const {
    return o.is_skip() ? skip_.at(x) : succ_.at(x * num_letters_ + o.letter_id());
  }

  Belief step(const Belief& b, Observation o) const {
    std::vector<PairId> next;
    for (PairId x : b) {
      const auto& s = successors(x, o);
      next.insert(next.end(), s.begin(), s.end());
    }
    return Belief(std::move(next));
  }

  Belief run(Belief b, std::span<const Observation> prefix) const {
    for (Observation o : prefix) b = step(b, o);
    return b;
  }

 private:
  static void dedupe(std::vector<PairId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  std::size_t num_letters_;
  std::vector<std::vector<PairId>> succ_;
  std::vector<std::vector<PairId>> skip_;
};

/// Parses a comma-separated observation prefix; `_` is the skip symbol and
/// the empty string is the empty prefix. Unknown letters are rejected.
inline std::vector<Observation> parse_prefix(const ProductMc& p, std::string_view text) {
  std::vector<Observation> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    auto comma = text.find(',', pos);
    auto tok = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (tok == "_") {
      out.push_back(Observation::skip());
    } else {
      auto a = p.mc().letters().find(tok);
      if (!a) throw ValidationError("unknown letter '" + std::string(tok) + "' in observation prefix");
      out.push_back(Observation::letter(*a));
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::string belief_to_string(const ProductMc& p, const Belief& b) {
  std::string s = "{";
  bool first = true;
  for (PairId x : b) {
    if (!first) s += " ";
    s += "(" + p.pair_name(x) + ")";
    first = false;
  }
  return s + "}";
}

}  // namespace selmon
