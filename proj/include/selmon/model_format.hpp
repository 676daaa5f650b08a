#pragma once

#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selmon/error.hpp"
#include "selmon/model.hpp"

namespace selmon {

struct Model {
  Mc mc;
  Dfa dfa;
};

namespace detail {

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line.substr(0, line.find('#')));
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  return tokens;
}

inline bool is_identifier(const std::string& s) {
  static const std::regex re("[A-Za-z0-9_.-]+");
  return std::regex_match(s, re);
}

}  // namespace detail

/// Parses the line-oriented model format:
///
///   [mc]
///   initial s0
///   trans s0 a 1/2 s1
///   [dfa]
///   initial q0
///   accepting f
///   trans q0 b f
///
/// Throws ParseError (with line number) on syntax errors and
/// ValidationError on model invariant violations.
inline Model load_model(std::string_view text) {
  enum class Section { None, Mc, Dfa };
  Section section = Section::None;
  bool seen_mc = false, seen_dfa = false;

  struct RawTrans {
    std::string src, letter, dst;
    Rational prob;
    std::size_t line;
  };
  std::string mc_initial, dfa_initial;
  std::vector<RawTrans> mc_trans;
  std::vector<std::string> dfa_accepting;
  std::vector<RawTrans> dfa_trans;

  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    auto tok = detail::tokenize(line);
    if (tok.empty()) continue;
    if (tok[0] == "[mc]" || tok[0] == "[dfa]") {
      if (tok.size() != 1) throw ParseError(lineno, "unexpected tokens after section header");
      if (tok[0] == "[mc]") {
        if (seen_mc) throw ParseError(lineno, "duplicate [mc] section");
        if (seen_dfa) throw ParseError(lineno, "[mc] section must come before [dfa]");
        section = Section::Mc;
        seen_mc = true;
      } else {
        if (seen_dfa) throw ParseError(lineno, "duplicate [dfa] section");
        if (!seen_mc) throw ParseError(lineno, "[mc] section must come before [dfa]");
        section = Section::Dfa;
        seen_dfa = true;
      }
      continue;
    }
    if (section == Section::None) throw ParseError(lineno, "content before the [mc] section");
    for (std::size_t i = 1; i < tok.size(); ++i) {
      bool is_prob = section == Section::Mc && tok[0] == "trans" && i == 3;
      if (!is_prob && !detail::is_identifier(tok[i])) throw ParseError(lineno, "invalid identifier '" + tok[i] + "'");
    }
    const std::string& kw = tok[0];
    if (kw == "initial") {
      if (tok.size() != 2) throw ParseError(lineno, "expected: initial <state>");
      auto& slot = section == Section::Mc ? mc_initial : dfa_initial;
      if (!slot.empty()) throw ParseError(lineno, "duplicate initial state");
      slot = tok[1];
    } else if (kw == "accepting" && section == Section::Dfa) {
      if (tok.size() != 2) throw ParseError(lineno, "expected: accepting <state>");
      dfa_accepting.push_back(tok[1]);
    } else if (kw == "trans" && section == Section::Mc) {
      if (tok.size() != 5) throw ParseError(lineno, "expected: trans <src> <letter> <num>/<den> <dst>");
      Rational p;
      try {
        p = Rational::parse(tok[3]);
      } catch (const std::exception& e) {
        throw ParseError(lineno, "bad probability '" + tok[3] + "': " + e.what());
      }
      if (p.sign() < 0 || p > Rational(1)) throw ParseError(lineno, "probability " + tok[3] + " outside [0,1]");
      mc_trans.push_back({tok[1], tok[2], tok[4], p, lineno});
    } else if (kw == "trans" && section == Section::Dfa) {
      if (tok.size() != 4) throw ParseError(lineno, "expected: trans <src> <letter> <dst>");
      dfa_trans.push_back({tok[1], tok[2], tok[3], Rational(0), lineno});
    } else {
      throw ParseError(lineno, "unknown directive '" + kw + "'");
    }
  }
  if (!seen_mc) throw ParseError(0, "missing [mc] section");
  if (!seen_dfa) throw ParseError(0, "missing [dfa] section");
  if (mc_initial.empty()) throw ParseError(0, "[mc] section has no initial state");
  if (dfa_initial.empty()) throw ParseError(0, "[dfa] section has no initial state");

  Interner states, letters;
  states.intern(mc_initial);
  std::vector<std::vector<McTransition>> out;
  for (const auto& t : mc_trans) {
    StateId s = states.intern(t.src);
    LetterId a = letters.intern(t.letter);
    StateId d = states.intern(t.dst);
    out.resize(states.size());
    out[s].push_back({a, d, t.prob});
  }
  out.resize(states.size());
  Mc mc(std::move(states), std::move(letters), 0, std::move(out));

  DfaBuilder builder(mc.letters().names());
  builder.set_initial(dfa_initial);
  for (const auto& f : dfa_accepting) builder.add_accepting(f);
  for (const auto& t : dfa_trans) {
    try {
      builder.add_transition(t.src, t.letter, t.dst);
    } catch (const ValidationError& e) {
      throw ParseError(t.line, e.what());
    }
  }
  return Model{std::move(mc), builder.build()};
}

/// Writes a model in the format accepted by load_model. The DFA is written
/// in its normalized form.
inline std::string write_model(const Mc& mc, const Dfa& dfa) {
  std::ostringstream out;
  out << "[mc]\n";
  out << "initial " << mc.states().name(mc.initial()) << "\n";
  for (StateId s = 0; s < mc.num_states(); ++s) {
    for (const auto& t : mc.out(s)) {
      out << "trans " << mc.states().name(s) << " " << mc.letters().name(t.letter) << " " << t.probability.str()
          << " " << mc.states().name(t.target) << "\n";
    }
  }
  out << "[dfa]\n";
  out << "initial " << dfa.states().name(dfa.initial()) << "\n";
  out << "accepting " << dfa.states().name(dfa.accepting()) << "\n";
  for (DfaStateId q = 0; q < dfa.num_states(); ++q) {
    for (LetterId a = 0; a < dfa.num_letters(); ++a) {
      out << "trans " << dfa.states().name(q) << " " << dfa.letters()[a] << " " << dfa.states().name(dfa.next(q, a))
          << "\n";
    }
  }
  return out.str();
}

}  // namespace selmon
