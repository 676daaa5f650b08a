#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selmon/belief.hpp"
#include "selmon/error.hpp"
#include "selmon/linear.hpp"
#include "selmon/product.hpp"
#include "selmon/qualitative.hpp"

namespace selmon {

/// Skip bound K; nullopt stands for infinity.
using SkipBound = std::optional<std::uint64_t>;
inline constexpr SkipBound kUnbounded = std::nullopt;

/// A value in N u {-1, inf}.
class Cras {
 public:
  static Cras infinite() { return Cras(0, true); }
  static Cras finite(std::int64_t v) { return Cras(v, false); }

  bool is_infinite() const { return infinite_; }
  std::int64_t value() const { return value_; }
  bool confused() const { return !infinite_ && value_ < 0; }
  std::string str() const { return infinite_ ? "inf" : std::to_string(value_); }

  friend bool operator==(const Cras&, const Cras&) = default;

 private:
  Cras(std::int64_t v, bool inf) : value_(v), infinite_(inf) {}
  std::int64_t value_;
  bool infinite_;
};

/// Language-equivalence and procrastination data for a non-hidden product.
/// The observed DFA has the letter transitions of the belief NFA (at most one
/// successor per letter) and accepting set F_pos, the positively deciding
/// pairs. Equivalence is computed by Moore refinement.
class NonHiddenAnalysis {
 public:
  explicit NonHiddenAnalysis(const ProductMc& p) : p_(p), nfa_(p), classes_(classify_pairs(p)) {
    auto targets = non_hidden_targets(p.mc());
    if (!targets) throw CapabilityError("the Markov chain is hidden; this analysis needs a non-hidden chain");
    targets_ = std::move(*targets);
    build_observed_dfa();
    refine();
    compute_pair_distances();
  }

  const ProductMc& product() const { return p_; }
  const BeliefNfa& nfa() const { return nfa_; }
  const std::vector<PairClass>& pair_classes() const { return classes_; }
  bool deciding(PairId x) const { return classes_[x] != PairClass::Undecided; }
  StateId target_of(LetterId a) const { return targets_[a]; }

  /// Successor in the observed DFA, or kNone when the letter is not enabled.
  PairId observed_next(PairId x, LetterId a) const { return next_[x * p_.num_letters() + a]; }

  std::uint32_t class_of(PairId x) const { return class_of_[x]; }
  std::size_t num_classes() const { return num_classes_; }
  bool equivalent(PairId x, PairId y) const { return class_of_[x] == class_of_[y]; }

  /// Classes met by pairs reachable from the initial pair.
  std::size_t num_reachable_classes() const {
    std::vector<char> seen(num_classes_, 0);
    std::size_t n = 0;
    for (auto x : reachable_pairs(p_, p_.initial())) {
      if (!seen[class_of_[x]]++) ++n;
    }
    return n;
  }

  /// Least pair with the same MC state and the same class. Equivalent pairs
  /// in different MC states may enable different letters, so a global
  /// representative would not preserve the monitor's transitions.
  PairId representative(PairId x) const { return rep_[x]; }

  /// res(B): one representative per class.
  Belief restrict(const Belief& b) const {
    std::vector<PairId> out;
    for (PairId x : b) out.push_back(rep_[x]);
    return Belief(std::move(out));
  }

  bool is_settled(const Belief& b) const {
    for (PairId x : b) {
      if (class_of_[x] != class_of_[*b.begin()]) return false;
    }
    return true;
  }

  bool confused(const Belief& b) const {
    for (LetterId a = 0; a < p_.num_letters(); ++a) {
      if (!is_settled(nfa_.step(b, Observation::letter(a)))) return true;
    }
    return false;
  }

  Cras cras(const Belief& b) const {
    std::uint64_t best = kFar;
    for (PairId x : b) {
      for (PairId y : b) best = std::min<std::uint64_t>(best, dist_[x * n_ + y]);
    }
    if (best == kFar) return Cras::infinite();
    auto v = static_cast<std::int64_t>(best) - 1;
    const auto bound = static_cast<std::int64_t>(p_.mc().num_states() * p_.mc().num_states() *
                                                 p_.dfa().num_states() * p_.dfa().num_states());
    if (v >= bound) throw std::logic_error("finite cras exceeds |S|^2|Q|^2");
    return Cras::finite(v);
  }
  Cras cras(PairId x) const { return cras(Belief{x}); }

  /// k(s,q) = min(K, cras(s,q)); nullopt when both are infinite.
  SkipBound skip_count(PairId x, SkipBound bound) const {
    Cras c = cras(x);
    if (c.confused()) throw std::logic_error("singleton belief confused in a non-hidden chain");
    if (c.is_infinite()) return bound;
    auto v = static_cast<std::uint64_t>(c.value());
    return bound ? std::min(*bound, v) : v;
  }

 private:
  static constexpr std::uint64_t kFar = static_cast<std::uint64_t>(-1);

  void build_observed_dfa() {
    const std::size_t l = p_.num_letters();
    n_ = p_.num_pairs();
    next_.assign(n_ * l, kNone);
    for (PairId x = 0; x < n_; ++x) {
      for (const auto& e : p_.out(x)) next_[x * l + e.letter] = e.target;
    }
  }

  void refine() {
    const std::size_t l = p_.num_letters();
    const std::size_t sink = n_;
    std::vector<std::uint32_t> cls(n_ + 1);
    for (PairId x = 0; x < n_; ++x) cls[x] = classes_[x] == PairClass::PositivelyDeciding ? 1 : 0;
    cls[sink] = 0;
    std::size_t count = 0;
    while (true) {
      std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
      std::vector<std::uint32_t> next_cls(n_ + 1);
      for (std::size_t x = 0; x <= n_; ++x) {
        std::vector<std::uint32_t> sig{cls[x]};
        for (LetterId a = 0; a < l; ++a) {
          PairId y = x == sink ? kNone : next_[x * l + a];
          sig.push_back(cls[y == kNone ? sink : y]);
        }
        auto [it, fresh] = ids.emplace(std::move(sig), static_cast<std::uint32_t>(ids.size()));
        next_cls[x] = it->second;
      }
      cls = std::move(next_cls);
      if (ids.size() == count) break;
      count = ids.size();
    }
    // Renumber by first occurrence over the pairs.
    std::vector<std::uint32_t> renum(n_ + 1, kNone);
    num_classes_ = 0;
    class_of_.resize(n_);
    for (PairId x = 0; x < n_; ++x) {
      if (renum[cls[x]] == kNone) renum[cls[x]] = static_cast<std::uint32_t>(num_classes_++);
      class_of_[x] = renum[cls[x]];
    }
    rep_.resize(n_);
    const std::size_t nq = p_.dfa().num_states();
    for (PairId x = 0; x < n_; ++x) {
      StateId s = p_.state_of(x);
      rep_[x] = x;
      for (DfaStateId q = 0; q < nq; ++q) {
        PairId y = p_.pair(s, q);
        if (class_of_[y] == class_of_[x]) {
          rep_[x] = y;
          break;
        }
      }
    }
  }

  // Shortest distance in the pair graph G from (x,y) to the witness set U.
  void compute_pair_distances() {
    const std::size_t l = p_.num_letters();
    const std::size_t nn = n_ * n_;
    dist_.assign(nn, kFar);
    std::vector<std::vector<std::uint32_t>> rev(nn);
    std::deque<std::uint32_t> queue;
    std::vector<PairId> around;
    for (PairId x = 0; x < n_; ++x) {
      for (PairId y = 0; y < n_; ++y) {
        const auto node = static_cast<std::uint32_t>(x * n_ + y);
        bool witness = false;
        for (LetterId a = 0; a < l && !witness; ++a) {
          PairId nx = next_[x * l + a], ny = next_[y * l + a];
          witness = nx != kNone && ny != kNone && class_of_[nx] != class_of_[ny];
        }
        if (witness) {
          dist_[node] = 0;
          queue.push_back(node);
        }
        const auto& sx = nfa_.successors(x, Observation::skip());
        const auto& sy = nfa_.successors(y, Observation::skip());
        around.assign(sx.begin(), sx.end());
        around.insert(around.end(), sy.begin(), sy.end());
        std::sort(around.begin(), around.end());
        around.erase(std::unique(around.begin(), around.end()), around.end());
        for (PairId u : around) {
          for (PairId v : around) rev[u * n_ + v].push_back(node);
        }
      }
    }
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      for (auto u : rev[v]) {
        if (dist_[u] == kFar) {
          dist_[u] = dist_[v] + 1;
          queue.push_back(u);
        }
      }
    }
  }

  const ProductMc& p_;
  BeliefNfa nfa_;
  std::vector<PairClass> classes_;
  std::vector<StateId> targets_;
  std::size_t n_ = 0;
  std::vector<PairId> next_;
  std::vector<std::uint32_t> class_of_;
  std::size_t num_classes_ = 0;
  std::vector<PairId> rep_;
  std::vector<std::uint64_t> dist_;
};

inline bool is_settled(const Belief& b, const NonHiddenAnalysis& nh) { return nh.is_settled(b); }
inline bool confused_nonhidden(const Belief& b, const NonHiddenAnalysis& nh) { return nh.confused(b); }
inline Cras compute_cras(const Belief& b, const NonHiddenAnalysis& nh) { return nh.cras(b); }

/// Compiled procrastination monitor. Nodes are representative pairs, named
/// by MC state and DFA state; edges are keyed by letter name.
struct MonitorTable {
  struct Node {
    std::string mc_state;
    std::string dfa_state;
    std::uint64_t skip = 0;
    std::optional<bool> verdict;
    std::vector<std::pair<std::string, std::uint32_t>> edges;
  };
  std::vector<Node> nodes;
  std::uint32_t start = 0;

  const Node& node(std::uint32_t id) const { return nodes.at(id); }
  std::optional<std::uint32_t> edge(std::uint32_t id, const std::string& letter) const {
    for (const auto& [a, t] : nodes.at(id).edges) {
      if (a == letter) return t;
    }
    return std::nullopt;
  }
  friend bool operator==(const MonitorTable& a, const MonitorTable& b) {
    if (a.start != b.start || a.nodes.size() != b.nodes.size()) return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
      const auto &x = a.nodes[i], &y = b.nodes[i];
      if (x.mc_state != y.mc_state || x.dfa_state != y.dfa_state || x.skip != y.skip || x.verdict != y.verdict ||
          x.edges != y.edges) {
        return false;
      }
    }
    return true;
  }
};

/// Compiles rho_pro(K). Throws CapabilityError for K = inf when a reachable
/// non-deciding node has infinite cras (its skip count would be unbounded).
inline MonitorTable compile_monitor(const NonHiddenAnalysis& nh, SkipBound bound) {
  const auto& p = nh.product();
  MonitorTable table;
  std::map<PairId, std::uint32_t> id;
  std::vector<PairId> order;
  auto visit = [&](PairId x) {
    auto [it, fresh] = id.emplace(x, static_cast<std::uint32_t>(order.size()));
    if (fresh) order.push_back(x);
    return it->second;
  };
  table.start = visit(nh.representative(p.initial()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    PairId x = order[i];
    MonitorTable::Node node;
    node.mc_state = p.mc().states().name(p.state_of(x));
    node.dfa_state = p.dfa().states().name(p.dfa_state_of(x));
    auto cls = nh.pair_classes()[x];
    if (cls != PairClass::Undecided) {
      node.verdict = cls == PairClass::PositivelyDeciding;
      table.nodes.push_back(std::move(node));
      continue;
    }
    auto k = nh.skip_count(x, bound);
    if (!k) {
      throw CapabilityError("node (" + p.pair_name(x) +
                            ") has infinite cras; K=inf cannot be emitted as a monitor table");
    }
    node.skip = *k;
    Belief d{x};
    for (std::uint64_t j = 0; j < *k; ++j) d = nh.nfa().step(d, Observation::skip());
    std::vector<std::pair<std::string, PairId>> raw;
    for (LetterId a = 0; a < p.num_letters(); ++a) {
      Belief next = nh.restrict(nh.nfa().step(d, Observation::letter(a)));
      if (next.empty()) continue;
      if (next.size() != 1) throw std::logic_error("restricted belief after the skips is not a singleton");
      raw.emplace_back(p.letter_name(a), *next.begin());
    }
    table.nodes.push_back(std::move(node));
    for (auto& [a, y] : raw) {
      auto t = visit(y);
      table.nodes[i].edges.emplace_back(a, t);
    }
  }
  return table;
}

/// M_pro(K). `letter == kNone` marks the $ letter.
struct ProcrastinationMc {
  struct Edge {
    LetterId letter;
    PairId target;
    Rational probability;
  };
  PairId initial = 0;
  std::vector<std::vector<Edge>> rows;
  /// k(s,q) per pair; nullopt for deciding pairs and for unbounded rows.
  std::vector<std::optional<std::uint64_t>> skips;

  SparseChain chain() const {
    SparseChain c;
    c.rows.resize(rows.size());
    for (std::size_t u = 0; u < rows.size(); ++u) {
      for (const auto& e : rows[u]) c.rows[u].emplace_back(e.target, e.probability);
    }
    return c;
  }
};

namespace detail {

/// Distribution e_x M'(skip)^k as a dense vector over pairs.
inline std::vector<Rational> skip_distribution(const ProductMc& p, PairId x, std::uint64_t k) {
  const std::size_t n = p.num_pairs();
  std::vector<Rational> v(n, Rational(0));
  v[x] = Rational(1);
  if (k <= 64) {
    for (std::uint64_t j = 0; j < k; ++j) {
      std::vector<Rational> w(n, Rational(0));
      for (PairId y = 0; y < n; ++y) {
        if (v[y].is_zero()) continue;
        for (const auto& e : p.out(y)) w[e.target] += v[y] * e.probability;
      }
      v = std::move(w);
    }
    return v;
  }
  // Repeated squaring of the dense skip matrix.
  using Matrix = std::vector<std::vector<Rational>>;
  Matrix base(n, std::vector<Rational>(n, Rational(0)));
  for (PairId y = 0; y < n; ++y) {
    for (const auto& e : p.out(y)) base[y][e.target] += e.probability;
  }
  auto mul_vec = [&](const std::vector<Rational>& a, const Matrix& m) {
    std::vector<Rational> w(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!m[i][j].is_zero()) w[j] += a[i] * m[i][j];
      }
    }
    return w;
  };
  auto square = [&](const Matrix& m) {
    Matrix r(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) r[i] = mul_vec(m[i], m);
    return r;
  };
  while (k > 0) {
    if (k & 1) v = mul_vec(v, base);
    k >>= 1;
    if (k > 0) base = square(base);
  }
  return v;
}

}  // namespace detail

inline ProcrastinationMc build_procrastination_mc(const NonHiddenAnalysis& nh, SkipBound bound) {
  const auto& p = nh.product();
  ProcrastinationMc m;
  m.initial = p.initial();
  m.rows.resize(p.num_pairs());
  m.skips.resize(p.num_pairs());
  for (PairId x = 0; x < p.num_pairs(); ++x) {
    if (nh.deciding(x)) {
      m.rows[x].push_back({kNone, x, Rational(1)});
      continue;
    }
    auto k = nh.skip_count(x, bound);
    if (!k) {
      m.rows[x].push_back({kNone, x, Rational(1)});
      continue;
    }
    m.skips[x] = k;
    auto v = detail::skip_distribution(p, x, *k);
    std::map<std::pair<LetterId, PairId>, Rational> acc;
    for (PairId y = 0; y < p.num_pairs(); ++y) {
      if (v[y].is_zero()) continue;
      for (const auto& e : p.out(y)) acc[{e.letter, e.target}] += v[y] * e.probability;
    }
    for (auto& [key, prob] : acc) m.rows[x].push_back({key.first, key.second, prob});
  }
  return m;
}

}  // namespace selmon
