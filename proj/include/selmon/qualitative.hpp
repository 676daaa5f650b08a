#pragma once

#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "selmon/belief.hpp"
#include "selmon/error.hpp"
#include "selmon/graph.hpp"
#include "selmon/product.hpp"

namespace selmon {

enum class PairClass : std::uint8_t { NegativelyDeciding, PositivelyDeciding, Undecided };

inline const char* to_string(PairClass c) {
  switch (c) {
    case PairClass::NegativelyDeciding: return "negative";
    case PairClass::PositivelyDeciding: return "positive";
    case PairClass::Undecided: return "undecided";
  }
  return "?";
}

/// Classifies every pair (s,q) by Pr_s(L_q) at the 0/1 level:
/// not negatively deciding iff an accepting pair is reachable;
/// not positively deciding iff a negatively deciding pair is reachable.
inline std::vector<PairClass> classify_pairs(const ProductMc& p) {
  Digraph g(p.num_pairs());
  std::vector<char> accepting(p.num_pairs(), 0);
  for (PairId x = 0; x < p.num_pairs(); ++x) {
    for (const auto& e : p.out(x)) g[x].push_back(e.target);
    accepting[x] = p.is_accepting(x);
  }
  auto not_negative = backward_reach(g, accepting);
  std::vector<char> negative(p.num_pairs());
  for (PairId x = 0; x < p.num_pairs(); ++x) negative[x] = !not_negative[x];
  auto not_positive = backward_reach(g, negative);

  std::vector<PairClass> cls(p.num_pairs());
  for (PairId x = 0; x < p.num_pairs(); ++x) {
    cls[x] = negative[x]       ? PairClass::NegativelyDeciding
             : !not_positive[x] ? PairClass::PositivelyDeciding
                                : PairClass::Undecided;
  }
  return cls;
}

struct AnalysisLimits {
  std::size_t max_nodes = 2'000'000;
};

/// Predicates of one belief. The empty belief is vacuously deciding (both
/// polarities) and very confused, and is neither enabled nor confused.
struct BeliefClass {
  bool enabled = false;
  bool positively_deciding = false;
  bool negatively_deciding = false;
  bool confused = false;
  bool very_confused = false;
  bool finitary = false;

  bool deciding() const { return positively_deciding || negatively_deciding; }
  friend bool operator==(const BeliefClass&, const BeliefClass&) = default;
};

struct GraphRoot {
  StateId state;
  Belief belief;
};

/// Reachable (mc-state, belief) pairs under full observation.
struct BeliefGraph {
  struct Node {
    StateId state;
    Belief belief;
    bool deciding = false;
    bool very_confused = false;
  };
  struct Edge {
    LetterId letter;
    std::uint32_t target;
    Rational probability;
  };

  std::vector<Node> nodes;
  std::vector<std::vector<Edge>> out;
  std::vector<std::uint32_t> roots;

  Digraph support() const {
    Digraph g(nodes.size());
    for (std::uint32_t u = 0; u < nodes.size(); ++u) {
      for (const auto& e : out[u]) g[u].push_back(e.target);
    }
    return g;
  }

  std::string to_dot(const ProductMc& p) const {
    std::ostringstream os;
    os << "digraph beliefs {\n  node [shape=box];\n";
    for (std::uint32_t u = 0; u < nodes.size(); ++u) {
      const auto& n = nodes[u];
      os << "  n" << u << " [label=\"" << p.mc().states().name(n.state) << " | " << belief_to_string(p, n.belief)
         << "\"";
      if (n.deciding) os << ", style=bold";
      if (n.very_confused) os << ", style=dashed";
      os << "];\n";
    }
    for (std::uint32_t u = 0; u < nodes.size(); ++u) {
      for (const auto& e : out[u]) {
        os << "  n" << u << " -> n" << e.target << " [label=\"" << e.probability.str() << " " << p.letter_name(e.letter)
           << "\"];\n";
      }
    }
    os << "}\n";
    return os.str();
  }
};

/// Decides the belief predicates by memoized search over the determinized
/// belief NFA (and its product with the MC). Memo tables live as long as
/// the analyzer; one analyzer per model and thread.
class BeliefAnalyzer {
 public:
  using BeliefId = std::uint32_t;
  using NodeId = std::uint32_t;

  explicit BeliefAnalyzer(const ProductMc& p, AnalysisLimits limits = {})
      : product_(p), nfa_(p), classes_(classify_pairs(p)), limits_(limits) {}

  const ProductMc& product() const { return product_; }
  const BeliefNfa& nfa() const { return nfa_; }
  const std::vector<PairClass>& pair_classes() const { return classes_; }
  PairClass pair_class(PairId x) const { return classes_.at(x); }

  bool positively_deciding(const Belief& b) const {
    return std::all_of(b.begin(), b.end(), [&](PairId x) { return classes_[x] == PairClass::PositivelyDeciding; });
  }
  bool negatively_deciding(const Belief& b) const {
    return std::all_of(b.begin(), b.end(), [&](PairId x) { return classes_[x] == PairClass::NegativelyDeciding; });
  }
  bool deciding(const Belief& b) const { return positively_deciding(b) || negatively_deciding(b); }

  /// No nonempty deciding belief is reachable from b by letters.
  bool is_very_confused(const Belief& b) { return very_confused(intern(b)); }

  /// Some (s,q) in b fails to reach a deciding belief almost surely under
  /// full observation.
  bool is_confused(const Belief& b) {
    if (b.empty()) return false;
    auto id = intern(b);
    auto roots = roots_of(id);
    return !almost_surely(roots, [&](BeliefId x) { return deciding_[x] != 0; });
  }

  /// Every (s,q) in b reaches a deciding or very confused belief almost surely.
  bool is_finitary(const Belief& b) {
    if (b.empty()) return true;
    auto id = intern(b);
    auto roots = roots_of(id);
    return almost_surely(roots, [&](BeliefId x) { return deciding_[x] != 0 || very_confused(x); });
  }

  BeliefClass classify(const Belief& b) {
    BeliefClass c;
    c.enabled = !b.empty();
    c.positively_deciding = positively_deciding(b);
    c.negatively_deciding = negatively_deciding(b);
    c.confused = is_confused(b);
    c.very_confused = is_very_confused(b);
    c.finitary = is_finitary(b);
    return c;
  }

  Belief initial_belief() const { return Belief{product_.initial()}; }

  /// Classification of an observation prefix via its belief Delta(B0, prefix).
  BeliefClass classify_prefix(std::span<const Observation> prefix) {
    for (auto o : prefix) {
      if (!o.is_skip() && o.letter_id() >= product_.num_letters()) throw ValidationError("letter not in alphabet");
    }
    return classify(nfa_.run(initial_belief(), prefix));
  }

  /// Forward exploration of (state, belief) nodes from the roots until
  /// closure. Edges follow MC-supported letters only. Throws CapacityError
  /// past the node cap.
  BeliefGraph build_belief_graph(const std::vector<GraphRoot>& roots, bool mark_very_confused = true) {
    std::vector<NodeId> root_ids;
    for (const auto& r : roots) root_ids.push_back(node(r.state, intern(r.belief)));
    auto order = explore(root_ids, [](NodeId) { return false; });

    BeliefGraph g;
    std::unordered_map<NodeId, std::uint32_t> local;
    for (auto u : order) {
      local.emplace(u, static_cast<std::uint32_t>(g.nodes.size()));
      const auto& n = nodes_[u];
      g.nodes.push_back({n.state, beliefs_[n.belief], deciding_[n.belief] != 0,
                         mark_very_confused ? very_confused(n.belief) : false});
    }
    g.out.resize(order.size());
    for (auto u : order) {
      for (const auto& e : node_out_[u]) g.out[local[u]].push_back({e.letter, local[e.target], e.probability});
    }
    for (auto r : root_ids) g.roots.push_back(local[r]);
    return g;
  }

  // Interned access, used by belief-tracking policies.

  BeliefId intern(const Belief& b) {
    auto it = index_.find(b);
    if (it != index_.end()) return it->second;
    if (beliefs_.size() >= limits_.max_nodes) {
      throw CapacityError("belief exploration exceeded the cap of " + std::to_string(limits_.max_nodes) + " nodes");
    }
    auto id = static_cast<BeliefId>(beliefs_.size());
    beliefs_.push_back(b);
    index_.emplace(b, id);
    deciding_.push_back(!b.empty() && deciding(b));
    letter_succ_.emplace_back();
    vc_.push_back(b.empty() ? 1 : -1);
    return id;
  }
  const Belief& belief(BeliefId id) const { return beliefs_.at(id); }
  bool deciding(BeliefId id) const { return deciding_.at(id) != 0; }

  BeliefId successor(BeliefId id, LetterId a) {
    if (letter_succ_[id].empty()) {
      std::vector<BeliefId> succ;
      for (LetterId l = 0; l < product_.num_letters(); ++l) {
        // intern may reallocate beliefs_; copy the step result first.
        Belief next = nfa_.step(beliefs_[id], Observation::letter(l));
        succ.push_back(intern(next));
      }
      letter_succ_[id] = std::move(succ);
    }
    return letter_succ_[id][a];
  }

  bool very_confused(BeliefId id) {
    if (vc_[id] >= 0) return vc_[id] != 0;
    // Closure over all letters, skipping the empty belief.
    std::vector<BeliefId> closure{id};
    std::unordered_map<BeliefId, std::uint32_t> local{{id, 0}};
    Digraph g(1);
    for (std::size_t i = 0; i < closure.size(); ++i) {
      for (LetterId a = 0; a < product_.num_letters(); ++a) {
        auto c = successor(closure[i], a);
        if (beliefs_[c].empty()) continue;
        auto [it, fresh] = local.emplace(c, static_cast<std::uint32_t>(closure.size()));
        if (fresh) {
          closure.push_back(c);
          g.emplace_back();
        }
        g[i].push_back(it->second);
      }
    }
    std::vector<char> target(closure.size());
    for (std::size_t i = 0; i < closure.size(); ++i) target[i] = deciding_[closure[i]];
    auto can = backward_reach(g, target);
    for (std::size_t i = 0; i < closure.size(); ++i) vc_[closure[i]] = can[i] ? 0 : 1;
    return vc_[id] != 0;
  }

  std::size_t num_interned_beliefs() const { return beliefs_.size(); }
  std::size_t num_interned_nodes() const { return nodes_.size(); }

 private:
  struct Node {
    StateId state;
    BeliefId belief;
  };
  struct NodeEdge {
    LetterId letter;
    NodeId target;
    Rational probability;
  };

  NodeId node(StateId s, BeliefId b) {
    std::uint64_t key = (static_cast<std::uint64_t>(b) << 32) | s;
    auto it = node_index_.find(key);
    if (it != node_index_.end()) return it->second;
    if (nodes_.size() >= limits_.max_nodes) {
      throw CapacityError("belief graph exceeded the cap of " + std::to_string(limits_.max_nodes) + " nodes");
    }
    auto id = static_cast<NodeId>(nodes_.size());
    nodes_.push_back({s, b});
    node_out_.emplace_back();
    expanded_.push_back(0);
    node_index_.emplace(key, id);
    return id;
  }

  void expand(NodeId u) {
    if (expanded_[u]) return;
    std::vector<NodeEdge> edges;
    StateId s = nodes_[u].state;
    BeliefId b = nodes_[u].belief;
    for (const auto& t : product_.mc().out(s)) {
      auto nb = successor(b, t.letter);
      edges.push_back({t.letter, node(t.target, nb), t.probability});
    }
    node_out_[u] = std::move(edges);
    expanded_[u] = 1;
  }

  std::vector<NodeId> roots_of(BeliefId b) {
    std::vector<NodeId> roots;
    StateId last = kNone;
    for (PairId x : beliefs_[b]) {
      StateId s = product_.state_of(x);
      if (s != last) roots.push_back(node(s, b));
      last = s;
    }
    return roots;
  }

  template <typename Stop>
  std::vector<NodeId> explore(const std::vector<NodeId>& roots, Stop stop) {
    std::vector<NodeId> order;
    std::unordered_map<NodeId, char> seen;
    for (auto r : roots) {
      if (seen.emplace(r, 1).second) order.push_back(r);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      auto u = order[i];
      if (stop(u)) continue;
      expand(u);
      for (std::size_t k = 0; k < node_out_[u].size(); ++k) {
        auto v = node_out_[u][k].target;
        if (seen.emplace(v, 1).second) order.push_back(v);
      }
    }
    return order;
  }

  /// Almost-sure reachability of nodes whose belief satisfies `is_target`.
  template <typename Target>
  bool almost_surely(const std::vector<NodeId>& roots, Target is_target) {
    auto target_node = [&](NodeId u) { return is_target(nodes_[u].belief); };
    auto order = explore(roots, target_node);
    std::unordered_map<NodeId, std::uint32_t> local;
    for (std::uint32_t i = 0; i < order.size(); ++i) local.emplace(order[i], i);
    Digraph g(order.size());
    std::vector<char> target(order.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) {
      target[i] = target_node(order[i]);
      if (target[i]) continue;
      for (const auto& e : node_out_[order[i]]) g[i].push_back(local.at(e.target));
    }
    auto can = backward_reach(g, target);
    return std::all_of(can.begin(), can.end(), [](char c) { return c != 0; });
  }

  const ProductMc& product_;
  BeliefNfa nfa_;
  std::vector<PairClass> classes_;
  AnalysisLimits limits_;

  std::vector<Belief> beliefs_;
  std::unordered_map<Belief, BeliefId, BeliefHash> index_;
  std::vector<char> deciding_;
  std::vector<std::vector<BeliefId>> letter_succ_;
  std::vector<std::int8_t> vc_;

  std::vector<Node> nodes_;
  std::vector<std::vector<NodeEdge>> node_out_;
  std::vector<char> expanded_;
  std::unordered_map<std::uint64_t, NodeId> node_index_;
};

/// A diagnoser exists iff the initial belief is not confused.
inline bool diagnoser_exists(const ProductMc& p, AnalysisLimits limits = {}) {
  BeliefAnalyzer an(p, limits);
  return !an.is_confused(an.initial_belief());
}

/// The infimum feasible cost is finite iff the initial belief is finitary.
inline bool cinf_is_finite(const ProductMc& p, AnalysisLimits limits = {}) {
  BeliefAnalyzer an(p, limits);
  return an.is_finitary(an.initial_belief());
}

}  // namespace selmon
