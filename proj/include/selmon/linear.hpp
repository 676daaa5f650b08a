#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "selmon/graph.hpp"
#include "selmon/rational.hpp"

namespace selmon {

/// Sparse substochastic chain: per node, (successor, probability) entries.
struct SparseChain {
  std::vector<std::vector<std::pair<std::uint32_t, Rational>>> rows;

  std::size_t size() const { return rows.size(); }
  Digraph support() const {
    Digraph g(rows.size());
    for (std::uint32_t u = 0; u < rows.size(); ++u) {
      for (const auto& [v, p] : rows[u]) {
        if (!p.is_zero()) g[u].push_back(v);
      }
    }
    return g;
  }
};

/// Solves A x = b exactly. Rows are scaled to integers and eliminated with
/// Bareiss' fraction-free scheme; back substitution is done over rationals.
/// Throws std::domain_error on a singular system.
inline std::vector<Rational> solve_linear(const std::vector<std::vector<Rational>>& a, const std::vector<Rational>& b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("dimension mismatch");
  // Augmented integer matrix.
  std::vector<std::vector<mpz_class>> m(n, std::vector<mpz_class>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw std::invalid_argument("matrix not square");
    mpz_class l = b[i].denominator();
    for (std::size_t j = 0; j < n; ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a[i][j].denominator().get_mpz_t());
    for (std::size_t j = 0; j < n; ++j) m[i][j] = a[i][j].numerator() * (l / a[i][j].denominator());
    m[i][n] = b[i].numerator() * (l / b[i].denominator());
  }
  mpz_class prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    while (piv < n && m[piv][k] == 0) ++piv;
    if (piv == n) throw std::domain_error("singular linear system");
    if (piv != k) std::swap(m[piv], m[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j <= n; ++j) {
        m[i][j] = (m[k][k] * m[i][j] - m[i][k] * m[k][j]);
        mpz_divexact(m[i][j].get_mpz_t(), m[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  std::vector<Rational> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Rational acc(m[i][n], mpz_class(1));
    for (std::size_t j = i + 1; j < n; ++j) {
      if (m[i][j] != 0) acc -= Rational(m[i][j], mpz_class(1)) * x[j];
    }
    x[i] = acc / Rational(m[i][i], mpz_class(1));
  }
  return x;
}

namespace detail {

inline constexpr std::uint32_t kUnvisited = static_cast<std::uint32_t>(-1);

/// Tarjan SCCs; components come out in reverse topological order
/// (every edge leads to the same or an earlier component).
inline std::vector<std::vector<std::uint32_t>> sccs(const Digraph& g) {
  const std::uint32_t n = static_cast<std::uint32_t>(g.size());
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<std::uint32_t>> out;
  std::uint32_t counter = 0;
  struct Frame {
    std::uint32_t node;
    std::size_t edge;
  };
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& f = call.back();
      if (f.edge < g[f.node].size()) {
        auto v = g[f.node][f.edge++];
        if (index[v] == kUnvisited) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          on_stack[v] = 1;
          call.push_back({v, 0});
        } else if (on_stack[v]) {
          low[f.node] = std::min(low[f.node], index[v]);
        }
        continue;
      }
      auto u = f.node;
      call.pop_back();
      if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[u]);
      if (low[u] == index[u]) {
        std::vector<std::uint32_t> comp;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != u);
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

/// Solves x_u = c_u + sum_v P(u,v) x_v for the `active` nodes, with x fixed
/// on inactive nodes. Works SCC by SCC so each dense solve stays small.
inline void solve_by_components(const SparseChain& chain, const std::vector<char>& active,
                                const std::vector<Rational>& constant, std::vector<Rational>& x) {
  Digraph g(chain.size());
  for (std::uint32_t u = 0; u < chain.size(); ++u) {
    if (!active[u]) continue;
    for (const auto& [v, p] : chain.rows[u]) {
      if (active[v] && !p.is_zero()) g[u].push_back(v);
    }
  }
  std::vector<std::uint32_t> local(chain.size(), 0);
  std::vector<std::uint32_t> comp_of(chain.size(), kUnvisited);
  std::uint32_t comp_no = 0;
  for (const auto& comp : sccs(g)) {
    ++comp_no;
    if (!active[comp.front()]) continue;
    const std::size_t n = comp.size();
    for (std::uint32_t i = 0; i < n; ++i) {
      local[comp[i]] = i;
      comp_of[comp[i]] = comp_no;
    }
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
    std::vector<Rational> b(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      auto u = comp[i];
      a[i][i] += Rational(1);
      b[i] = constant[u];
      for (const auto& [v, p] : chain.rows[u]) {
        if (comp_of[v] == comp_no) {
          a[i][local[v]] -= p;
        } else {
          b[i] += p * x[v];
        }
      }
    }
    auto sol = solve_linear(a, b);
    for (std::uint32_t i = 0; i < n; ++i) x[comp[i]] = sol[i];
  }
}

}  // namespace detail

/// Probability of eventually reaching a target node, for every node.
inline std::vector<Rational> hitting_probability(const SparseChain& chain, const std::vector<char>& target) {
  auto g = chain.support();
  auto can = backward_reach(g, target);
  std::vector<Rational> x(chain.size(), Rational(0));
  std::vector<char> active(chain.size(), 0);
  std::vector<Rational> constant(chain.size(), Rational(0));
  for (std::uint32_t u = 0; u < chain.size(); ++u) {
    if (target[u]) x[u] = Rational(1);
    active[u] = can[u] && !target[u];
  }
  detail::solve_by_components(chain, active, constant, x);
  return x;
}

/// Expected number of steps until a target node is reached, for every
/// node. Nodes that miss the targets with positive probability get infinity.
/// `step_cost` (default 1 per step) is charged on leaving each non-target
/// node; `terminal` (default 0) is the value collected at each target.
inline std::vector<ExtRational> expected_hitting_time(const SparseChain& chain, const std::vector<char>& target,
                                                      const std::vector<Rational>* step_cost = nullptr,
                                                      const std::vector<Rational>* terminal = nullptr) {
  auto g = chain.support();
  // Restrict the graph to paths that have not yet hit the target.
  Digraph h(g.size());
  for (std::uint32_t u = 0; u < g.size(); ++u) {
    if (!target[u]) h[u] = g[u];
  }
  auto can = backward_reach(h, target);
  std::vector<char> doomed(g.size());
  for (std::uint32_t u = 0; u < g.size(); ++u) doomed[u] = !can[u];
  auto bad = backward_reach(h, doomed);

  std::vector<Rational> x(chain.size(), Rational(0));
  std::vector<char> active(chain.size(), 0);
  std::vector<Rational> constant(chain.size(), Rational(0));
  for (std::uint32_t u = 0; u < chain.size(); ++u) {
    active[u] = !target[u] && !bad[u];
    if (active[u]) constant[u] = step_cost ? (*step_cost)[u] : Rational(1);
    if (target[u] && terminal) x[u] = (*terminal)[u];
  }
  detail::solve_by_components(chain, active, constant, x);

  std::vector<ExtRational> out(chain.size());
  for (std::uint32_t u = 0; u < chain.size(); ++u) {
    out[u] = (!target[u] && bad[u]) ? ExtRational::infinity() : ExtRational(x[u]);
  }
  return out;
}

}  // namespace selmon
