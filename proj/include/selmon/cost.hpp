#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "selmon/linear.hpp"
#include "selmon/nonhidden.hpp"
#include "selmon/qualitative.hpp"

namespace selmon {

namespace detail {

/// The product as a chain, with edges from the same source merged by target.
inline SparseChain product_chain(const ProductMc& p) {
  SparseChain c;
  c.rows.resize(p.num_pairs());
  for (PairId x = 0; x < p.num_pairs(); ++x) {
    std::map<PairId, Rational> acc;
    for (const auto& e : p.out(x)) acc[e.target] += e.probability;
    for (auto& [t, pr] : acc) c.rows[x].emplace_back(t, pr);
  }
  return c;
}

inline SparseChain belief_graph_chain(const BeliefGraph& g) {
  SparseChain c;
  c.rows.resize(g.nodes.size());
  for (std::uint32_t u = 0; u < g.nodes.size(); ++u) {
    std::map<std::uint32_t, Rational> acc;
    for (const auto& e : g.out[u]) acc[e.target] += e.probability;
    for (auto& [t, pr] : acc) c.rows[u].emplace_back(t, pr);
  }
  return c;
}

inline BeliefGraph initial_belief_graph(BeliefAnalyzer& an) {
  const auto& p = an.product();
  return an.build_belief_graph({{p.mc().initial(), an.initial_belief()}});
}

}  // namespace detail

/// Probability that see-all eventually decides, via the product (valid for
/// non-hidden chains, where full observation keeps singleton beliefs).
inline Rational decision_probability_product(const ProductMc& p) {
  auto cls = classify_pairs(p);
  std::vector<char> target(p.num_pairs());
  for (PairId x = 0; x < p.num_pairs(); ++x) target[x] = cls[x] != PairClass::Undecided;
  return hitting_probability(detail::product_chain(p), target)[p.initial()];
}

/// Probability that see-all eventually decides, via the belief graph.
inline Rational decision_probability_beliefs(const ProductMc& p, AnalysisLimits limits = {}) {
  BeliefAnalyzer an(p, limits);
  auto g = detail::initial_belief_graph(an);
  std::vector<char> target(g.nodes.size());
  for (std::uint32_t u = 0; u < g.nodes.size(); ++u) target[u] = g.nodes[u].deciding;
  return hitting_probability(detail::belief_graph_chain(g), target)[g.roots.front()];
}

inline Rational decision_probability(const ProductMc& p, AnalysisLimits limits = {}) {
  return is_non_hidden(p.mc()) ? decision_probability_product(p) : decision_probability_beliefs(p, limits);
}

/// E(C_smart) for a non-hidden chain: hitting time of deciding pairs.
inline ExtRational expected_smart_cost_product(const ProductMc& p) {
  auto cls = classify_pairs(p);
  std::vector<char> target(p.num_pairs());
  for (PairId x = 0; x < p.num_pairs(); ++x) target[x] = cls[x] != PairClass::Undecided;
  return expected_hitting_time(detail::product_chain(p), target)[p.initial()];
}

/// E(C_smart) on the belief graph: hitting time of deciding-or-very-confused
/// nodes; infinite unless the initial belief is finitary.
inline ExtRational expected_smart_cost_beliefs(const ProductMc& p, AnalysisLimits limits = {}) {
  BeliefAnalyzer an(p, limits);
  if (!an.is_finitary(an.initial_belief())) return ExtRational::infinity();
  auto g = detail::initial_belief_graph(an);
  std::vector<char> target(g.nodes.size());
  for (std::uint32_t u = 0; u < g.nodes.size(); ++u) {
    target[u] = g.nodes[u].deciding || g.nodes[u].very_confused;
  }
  return expected_hitting_time(detail::belief_graph_chain(g), target)[g.roots.front()];
}

inline ExtRational expected_smart_cost(const ProductMc& p, AnalysisLimits limits = {}) {
  if (!is_non_hidden(p.mc())) return expected_smart_cost_beliefs(p, limits);
  if (!cinf_is_finite(p, limits)) return ExtRational::infinity();
  return expected_smart_cost_product(p);
}

/// E(C_pro(K)): observations made by rho_pro(K) before a verdict.
inline Rational expected_pro_cost(const NonHiddenAnalysis& nh, std::uint64_t k) {
  auto m = build_procrastination_mc(nh, k);
  std::vector<char> target(m.rows.size());
  for (PairId x = 0; x < m.rows.size(); ++x) target[x] = nh.deciding(x);
  auto t = expected_hitting_time(m.chain(), target)[m.initial];
  if (t.is_infinite()) throw std::logic_error("procrastination policy fails to decide almost surely");
  return t.value();
}

inline Rational expected_pro_cost(const ProductMc& p, std::uint64_t k) { return expected_pro_cost(NonHiddenAnalysis(p), k); }

/// c_inf for a non-hidden chain: c = 0 on deciding pairs, 1 on non-deciding
/// pairs with infinite cras, and 1 + sum M_pro(inf) c otherwise.
inline Rational compute_cinf(const NonHiddenAnalysis& nh) {
  auto m = build_procrastination_mc(nh, kUnbounded);
  const std::size_t n = m.rows.size();
  std::vector<char> fixed(n);
  std::vector<Rational> terminal(n, Rational(0));
  for (PairId x = 0; x < n; ++x) {
    bool unbounded = !nh.deciding(x) && !m.skips[x];
    fixed[x] = nh.deciding(x) || unbounded;
    if (unbounded) terminal[x] = Rational(1);
  }
  auto c = expected_hitting_time(m.chain(), fixed, nullptr, &terminal)[m.initial];
  if (c.is_infinite()) throw std::logic_error("c_inf system has no finite solution");
  return c.value();
}

inline Rational compute_cinf(const ProductMc& p) { return compute_cinf(NonHiddenAnalysis(p)); }

inline const std::vector<std::uint64_t>& default_k_sweep() {
  static const std::vector<std::uint64_t> ks{0, 1, 2, 4, 8, 16, 32, 64};
  return ks;
}

struct CostReport {
  ExtRational expected_smart;
  std::optional<Rational> cinf;  // absent on hidden chains
  std::vector<std::pair<std::uint64_t, Rational>> expected_pro;
  Rational decision_probability;
  std::optional<Rational> ratio;  // cinf / expected_smart when defined
};

/// Full report. Hidden chains get only the see-all quantities.
inline CostReport cost_report(const ProductMc& p, const std::vector<std::uint64_t>& ks = default_k_sweep(),
                              AnalysisLimits limits = {}) {
  CostReport r;
  r.decision_probability = decision_probability(p, limits);
  r.expected_smart = expected_smart_cost(p, limits);
  if (!is_non_hidden(p.mc())) return r;
  NonHiddenAnalysis nh(p);
  r.cinf = compute_cinf(nh);
  for (auto k : ks) r.expected_pro.emplace_back(k, expected_pro_cost(nh, k));
  if (r.expected_smart.is_finite() && !r.expected_smart.value().is_zero()) r.ratio = *r.cinf / r.expected_smart.value();
  return r;
}

}  // namespace selmon
