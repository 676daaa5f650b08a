#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace selmon {

/// Adjacency lists over dense node ids.
using Digraph = std::vector<std::vector<std::uint32_t>>;

/// Nodes from which some target is reachable (targets included).
inline std::vector<char> backward_reach(const Digraph& g, const std::vector<char>& target) {
  Digraph rev(g.size());
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    for (auto v : g[u]) rev[v].push_back(u);
  }
  std::vector<char> mark(target);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    if (mark[u]) stack.push_back(u);
  }
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto u : rev[v]) {
      if (!mark[u]) {
        mark[u] = 1;
        stack.push_back(u);
      }
    }
  }
  return mark;
}

/// Nodes reachable from `roots` without leaving through a stop node
/// (stop nodes are included but not expanded).
inline std::vector<char> forward_reach(const Digraph& g, std::span<const std::uint32_t> roots,
                                       const std::vector<char>& stop) {
  std::vector<char> seen(g.size(), 0);
  std::vector<std::uint32_t> stack(roots.begin(), roots.end());
  for (auto r : roots) seen[r] = 1;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    if (stop[u]) continue;
    for (auto v : g[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

/// Qualitative almost-sure reachability on a finite Markov chain whose
/// support graph is `g`: from every root, the targets are reached with
/// probability 1 iff every node reachable before the targets can still
/// reach a target.
inline bool almost_surely_reaches(const Digraph& g, std::span<const std::uint32_t> roots,
                                  const std::vector<char>& target) {
  auto reach = forward_reach(g, roots, target);
  auto can = backward_reach(g, target);
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    if (reach[u] && !can[u]) return false;
  }
  return true;
}

}  // namespace selmon
