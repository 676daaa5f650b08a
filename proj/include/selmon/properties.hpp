#pragma once

#include <regex>
#include <string>
#include <vector>

#include "selmon/error.hpp"
#include "selmon/model.hpp"

namespace selmon {

/// Iterator protocol: no two `next` calls without a `hasNext` in between.
/// Letters other than next/hasNext behave like `other`.
inline Dfa iterator_property(const std::vector<std::string>& letters) {
  DfaBuilder b(letters);
  bool has_next = false, has_has_next = false;
  for (const auto& a : letters) {
    has_next |= a == "next";
    has_has_next |= a == "hasNext";
  }
  if (!has_next || !has_has_next) throw ValidationError("iterator property needs letters 'next' and 'hasNext'");
  b.set_initial("ok");
  b.add_accepting("fail");
  for (const auto& a : letters) {
    if (a == "next") {
      b.add_transition("ok", a, "armed");
      b.add_transition("armed", a, "fail");
    } else if (a == "hasNext") {
      b.add_transition("ok", a, "ok");
      b.add_transition("armed", a, "ok");
    } else {
      b.add_transition("ok", a, "ok");
      b.add_transition("armed", a, "armed");
    }
    b.add_transition("fail", a, "fail");
  }
  return b.build();
}

/// Words containing letter `target` somewhere.
inline Dfa reach_letter_property(const std::vector<std::string>& letters, const std::string& target) {
  DfaBuilder b(letters);
  b.set_initial("q0");
  b.add_accepting("f");
  bool found = false;
  for (const auto& a : letters) {
    b.add_transition("q0", a, a == target ? "f" : "q0");
    b.add_transition("f", a, "f");
    found |= a == target;
  }
  if (!found) throw ValidationError("letter '" + target + "' is not in the alphabet");
  return b.build();
}

/// Words with letter `target` at some position i >= 1 with i = 0 mod m
/// (positions counted from 0).
inline Dfa parity_position_property(const std::vector<std::string>& letters, const std::string& target, unsigned m) {
  if (m == 0) throw ValidationError("parity-position modulus must be positive");
  DfaBuilder b(letters);
  auto name = [](unsigned j) { return "c" + std::to_string(j); };
  b.set_initial("start");
  b.add_accepting("f");
  bool found = false;
  for (const auto& a : letters) {
    found |= a == target;
    // start reads position 0; c<j> reads a position congruent to j, j > 0 or past the start.
    b.add_transition("start", a, name(1 % m));
    for (unsigned j = 0; j < m; ++j) {
      if (j == 0 && a == target) {
        b.add_transition(name(0), a, "f");
      } else {
        b.add_transition(name(j), a, name((j + 1) % m));
      }
    }
    b.add_transition("f", a, "f");
  }
  if (!found) throw ValidationError("letter '" + target + "' is not in the alphabet");
  return b.build();
}

/// `iterator`, `reach_letter(a)`, or `parity_position(a,m)` (also spelled
/// with a dash).
inline Dfa builtin_property(const std::string& spec, const std::vector<std::string>& letters) {
  static const std::regex reach(R"(reach_letter\(\s*([A-Za-z0-9_.-]+)\s*\))");
  static const std::regex parity(R"(parity[-_]position\(\s*([A-Za-z0-9_.-]+)\s*,\s*([0-9]+)\s*\))");
  std::smatch m;
  if (spec == "iterator") return iterator_property(letters);
  if (std::regex_match(spec, m, reach)) return reach_letter_property(letters, m[1]);
  if (std::regex_match(spec, m, parity)) {
    return parity_position_property(letters, m[1], static_cast<unsigned>(std::stoul(m[2])));
  }
  throw ValidationError("unknown property '" + spec + "'");
}

}  // namespace selmon
