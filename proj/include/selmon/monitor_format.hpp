#pragma once

#include <sstream>
#include <string>
#include <string_view>

#include "selmon/error.hpp"
#include "selmon/model_format.hpp"
#include "selmon/nonhidden.hpp"

namespace selmon {

/// Writes a monitor table:
///
///   [monitor]
///   start 0
///   node 0 pair A,q0 skip 1
///   edge 0 b 1
///   verdict 1 no
inline std::string write_monitor(const MonitorTable& t) {
  std::ostringstream out;
  out << "[monitor]\n";
  out << "start " << t.start << "\n";
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    out << "node " << i << " pair " << n.mc_state << "," << n.dfa_state << " skip " << n.skip << "\n";
  }
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const auto& n = t.nodes[i];
    if (n.verdict) out << "verdict " << i << " " << (*n.verdict ? "yes" : "no") << "\n";
    for (const auto& [a, to] : n.edges) out << "edge " << i << " " << a << " " << to << "\n";
  }
  return out.str();
}

inline MonitorTable load_monitor(std::string_view text) {
  MonitorTable t;
  bool header = false, has_start = false;
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  auto parse_id = [&](const std::string& s) -> std::uint32_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError(lineno, "bad node id '" + s + "'");
    }
    return static_cast<std::uint32_t>(std::stoul(s));
  };
  auto node_ref = [&](const std::string& s) -> MonitorTable::Node& {
    auto id = parse_id(s);
    if (id >= t.nodes.size()) throw ParseError(lineno, "undeclared node " + s);
    return t.nodes[id];
  };
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    auto tok = detail::tokenize(line);
    if (tok.empty()) continue;
    if (!header) {
      if (tok.size() != 1 || tok[0] != "[monitor]") throw ParseError(lineno, "expected [monitor]");
      header = true;
      continue;
    }
    const auto& kw = tok[0];
    if (kw == "start" && tok.size() == 2) {
      if (has_start) throw ParseError(lineno, "duplicate start");
      t.start = parse_id(tok[1]);
      has_start = true;
    } else if (kw == "node" && tok.size() == 6 && tok[2] == "pair" && tok[4] == "skip") {
      if (parse_id(tok[1]) != t.nodes.size()) throw ParseError(lineno, "nodes must be declared in order");
      auto comma = tok[3].find(',');
      if (comma == std::string::npos) throw ParseError(lineno, "expected <state>,<dfa-state>");
      MonitorTable::Node n;
      n.mc_state = tok[3].substr(0, comma);
      n.dfa_state = tok[3].substr(comma + 1);
      if (!detail::is_identifier(n.mc_state) || !detail::is_identifier(n.dfa_state)) {
        throw ParseError(lineno, "invalid pair '" + tok[3] + "'");
      }
      if (tok[5].find_first_not_of("0123456789") != std::string::npos) throw ParseError(lineno, "bad skip count");
      n.skip = std::stoull(tok[5]);
      t.nodes.push_back(std::move(n));
    } else if (kw == "edge" && tok.size() == 4) {
      auto& n = node_ref(tok[1]);
      if (n.verdict) throw ParseError(lineno, "verdict nodes have no edges");
      if (!detail::is_identifier(tok[2])) throw ParseError(lineno, "invalid letter '" + tok[2] + "'");
      for (const auto& e : n.edges) {
        if (e.first == tok[2]) throw ParseError(lineno, "duplicate edge on letter " + tok[2]);
      }
      n.edges.emplace_back(tok[2], parse_id(tok[3]));
    } else if (kw == "verdict" && tok.size() == 3 && (tok[2] == "yes" || tok[2] == "no")) {
      auto& n = node_ref(tok[1]);
      if (n.verdict || !n.edges.empty()) throw ParseError(lineno, "conflicting verdict");
      n.verdict = tok[2] == "yes";
    } else {
      throw ParseError(lineno, "unknown directive '" + kw + "'");
    }
  }
  if (!header) throw ParseError(0, "missing [monitor] header");
  if (!has_start) throw ParseError(0, "missing start");
  if (t.start >= t.nodes.size()) throw ParseError(0, "start node out of range");
  for (const auto& n : t.nodes) {
    for (const auto& e : n.edges) {
      if (e.second >= t.nodes.size()) throw ParseError(0, "edge to undeclared node " + std::to_string(e.second));
    }
  }
  return t;
}

}  // namespace selmon
