#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "selmon/error.hpp"
#include "selmon/model_format.hpp"
#include "selmon/properties.hpp"

namespace selmon {

struct GenSpec {
  std::size_t states = 4;
  std::size_t letters = 2;    // ignored when non_hidden (one letter per state)
  std::size_t out_degree = 2;  // upper bound; each state draws 1..out_degree successors
  double alpha = 1.0;          // Dirichlet concentration
  std::uint64_t seed = 0;
  bool non_hidden = true;
  std::size_t sinks = 0;       // the last `sinks` states only loop on themselves
  std::string property;        // builtin property; empty means reach_letter of the last letter
};

/// Dirichlet(alpha,...,alpha) rounded to weights over 2^32: each weight is at
/// least 1 and the rounding residual goes to the largest coordinate, so the
/// row sums to exactly 2^32.
inline std::vector<std::uint64_t> dirichlet_weights(std::size_t n, double alpha, std::mt19937_64& rng) {
  constexpr std::uint64_t kScale = std::uint64_t(1) << 32;
  std::gamma_distribution<double> gamma(alpha, 1.0);
  std::vector<double> g(n);
  for (auto& x : g) x = gamma(rng);
  double sum = std::accumulate(g.begin(), g.end(), 0.0);
  if (!(sum > 0)) std::fill(g.begin(), g.end(), 1.0), sum = double(n);
  std::vector<std::uint64_t> w(n);
  std::int64_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(g[i] / sum * double(kScale)));
    total += static_cast<std::int64_t>(w[i]);
  }
  auto largest = std::max_element(w.begin(), w.end()) - w.begin();
  w[largest] = static_cast<std::uint64_t>(static_cast<std::int64_t>(w[largest]) + (static_cast<std::int64_t>(kScale) - total));
  return w;
}

namespace detail {

inline std::string weight_str(std::uint64_t w) {
  Rational r(mpz_class(static_cast<unsigned long>(w)), mpz_class(1) << 32);
  return r.str();
}

inline std::string write_dfa_section(const Dfa& dfa) {
  std::ostringstream out;
  out << "[dfa]\ninitial " << dfa.states().name(dfa.initial()) << "\n";
  out << "accepting " << dfa.states().name(dfa.accepting()) << "\n";
  for (DfaStateId q = 0; q < dfa.num_states(); ++q) {
    for (LetterId a = 0; a < dfa.num_letters(); ++a) {
      out << "trans " << dfa.states().name(q) << " " << dfa.letters()[a] << " " << dfa.states().name(dfa.next(q, a))
          << "\n";
    }
  }
  return out.str();
}

}  // namespace detail

/// Random model text. Deterministic in the spec (including the seed).
inline std::string generate_model(const GenSpec& spec) {
  if (spec.states == 0) throw ValidationError("need at least one state");
  if (spec.sinks >= spec.states && spec.states > 1) throw ValidationError("at least one state must not be a sink");
  if (!(spec.alpha > 0)) throw ValidationError("Dirichlet concentration must be positive");
  const std::size_t nl = spec.non_hidden ? spec.states : spec.letters;
  if (nl == 0) throw ValidationError("need at least one letter");
  const std::size_t max_degree = spec.non_hidden ? spec.states : spec.states * nl;
  if (spec.out_degree == 0 || spec.out_degree > max_degree) {
    throw ValidationError("out-degree bound " + std::to_string(spec.out_degree) + " is infeasible (must be in 1.." +
                          std::to_string(max_degree) + ")");
  }
  std::mt19937_64 rng(spec.seed);
  auto state = [](std::size_t i) { return "s" + std::to_string(i); };
  auto letter = [](std::size_t i) { return "a" + std::to_string(i); };

  std::ostringstream out;
  out << "# generated: states=" << spec.states << " letters=" << nl << " degree<=" << spec.out_degree
      << " alpha=" << spec.alpha << " seed=" << spec.seed << (spec.non_hidden ? " non-hidden" : " hidden") << "\n";
  out << "[mc]\ninitial s0\n";
  std::vector<std::string> letters;
  for (std::size_t i = 0; i < nl; ++i) letters.push_back(letter(i));
  std::vector<char> used(nl, 0);
  for (std::size_t s = 0; s < spec.states; ++s) {
    bool sink = s + spec.sinks >= spec.states && spec.states > 1;
    // Candidate edges as (letter, target).
    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    if (sink) {
      chosen.emplace_back(spec.non_hidden ? s : std::uniform_int_distribution<std::size_t>(0, nl - 1)(rng), s);
    } else {
      std::size_t degree = std::uniform_int_distribution<std::size_t>(1, spec.out_degree)(rng);
      std::vector<std::size_t> pool(max_degree);
      std::iota(pool.begin(), pool.end(), 0);
      for (std::size_t i = 0; i < degree; ++i) {
        std::size_t j = std::uniform_int_distribution<std::size_t>(i, pool.size() - 1)(rng);
        std::swap(pool[i], pool[j]);
        std::size_t e = pool[i];
        if (spec.non_hidden) {
          chosen.emplace_back(e, e);
        } else {
          chosen.emplace_back(e % nl, e / nl);
        }
      }
      std::sort(chosen.begin(), chosen.end());
    }
    auto w = dirichlet_weights(chosen.size(), spec.alpha, rng);
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      used[chosen[i].first] = 1;
      out << "trans " << state(s) << " " << letter(chosen[i].first) << " " << detail::weight_str(w[i]) << " "
          << state(chosen[i].second) << "\n";
    }
  }
  // The MC alphabet is what the transitions use.
  std::vector<std::string> alphabet;
  for (std::size_t i = 0; i < nl; ++i) {
    if (used[i]) alphabet.push_back(letters[i]);
  }
  std::string prop = spec.property;
  if (prop.empty()) prop = "reach_letter(" + alphabet.back() + ")";
  Dfa dfa = builtin_property(prop, alphabet);
  return out.str() + detail::write_dfa_section(dfa);
}

/// A labelled directed graph; probabilities are attached by Dirichlet draws.
struct FlowgraphSpec {
  std::vector<std::string> vertices;
  struct Edge {
    std::string from, event, to;
  };
  std::vector<Edge> edges;
  std::string entry;
};

/// Format:
///   [flowgraph]
///   entry v0
///   vertex v3          (optional; vertices are also taken from edges)
///   edge v0 open v1
inline FlowgraphSpec load_flowgraph(std::string_view text) {
  FlowgraphSpec f;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  bool header = false;
  auto add_vertex = [&](const std::string& v) {
    if (std::find(f.vertices.begin(), f.vertices.end(), v) == f.vertices.end()) f.vertices.push_back(v);
  };
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    auto tok = detail::tokenize(line);
    if (tok.empty()) continue;
    for (const auto& t : tok) {
      if (t != "[flowgraph]" && !detail::is_identifier(t)) throw ParseError(lineno, "invalid identifier '" + t + "'");
    }
    if (!header) {
      if (tok.size() != 1 || tok[0] != "[flowgraph]") throw ParseError(lineno, "expected [flowgraph]");
      header = true;
    } else if (tok[0] == "entry" && tok.size() == 2) {
      if (!f.entry.empty()) throw ParseError(lineno, "duplicate entry");
      f.entry = tok[1];
      add_vertex(tok[1]);
    } else if (tok[0] == "vertex" && tok.size() == 2) {
      add_vertex(tok[1]);
    } else if (tok[0] == "edge" && tok.size() == 4) {
      add_vertex(tok[1]);
      add_vertex(tok[3]);
      f.edges.push_back({tok[1], tok[2], tok[3]});
    } else {
      throw ParseError(lineno, "unknown directive '" + tok[0] + "'");
    }
  }
  if (!header) throw ParseError(0, "missing [flowgraph] header");
  if (f.entry.empty()) throw ParseError(0, "missing entry vertex");
  return f;
}

/// Model text for a flowgraph: each vertex's out-edges get Dirichlet
/// probabilities; vertices without out-edges loop on a fresh quiescent letter.
inline std::string flowgraph_model(const FlowgraphSpec& f, double alpha, std::uint64_t seed, const std::string& property) {
  if (!(alpha > 0)) throw ValidationError("Dirichlet concentration must be positive");
  std::mt19937_64 rng(seed);
  std::vector<std::string> events;
  for (const auto& e : f.edges) {
    if (std::find(events.begin(), events.end(), e.event) == events.end()) events.push_back(e.event);
  }
  std::string quiet = "quiet";
  while (std::find(events.begin(), events.end(), quiet) != events.end()) quiet += "_";

  std::ostringstream out;
  out << "[mc]\ninitial " << f.entry << "\n";
  // Entry first so it is interned as the initial state.
  std::vector<std::string> order{f.entry};
  for (const auto& v : f.vertices) {
    if (v != f.entry) order.push_back(v);
  }
  for (const auto& v : order) {
    std::vector<const FlowgraphSpec::Edge*> outs;
    for (const auto& e : f.edges) {
      if (e.from == v) outs.push_back(&e);
    }
    if (outs.empty()) {
      out << "trans " << v << " " << quiet << " 1 " << v << "\n";
      continue;
    }
    auto w = dirichlet_weights(outs.size(), alpha, rng);
    for (std::size_t i = 0; i < outs.size(); ++i) {
      out << "trans " << v << " " << outs[i]->event << " " << detail::weight_str(w[i]) << " " << outs[i]->to << "\n";
    }
  }
  std::vector<std::string> alphabet;
  for (const auto& v : order) {
    bool sink = std::none_of(f.edges.begin(), f.edges.end(), [&](const auto& e) { return e.from == v; });
    if (sink && std::find(alphabet.begin(), alphabet.end(), quiet) == alphabet.end()) alphabet.push_back(quiet);
  }
  for (const auto& e : events) alphabet.push_back(e);
  Dfa dfa = builtin_property(property, alphabet);
  return out.str() + detail::write_dfa_section(dfa);
}

}  // namespace selmon
