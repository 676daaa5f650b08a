#pragma once

#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"

#include "selmon/cost.hpp"

namespace selmon {

/// 12 significant digits.
inline std::string decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_value(const Rational& r) { return r.str() + " (" + decimal(r.to_double()) + ")"; }
inline std::string format_value(const ExtRational& r) {
  return r.is_infinite() ? std::string("inf") : format_value(r.value());
}

inline nlohmann::json to_json(const Rational& r) {
  return {{"value", r.str()}, {"approx", r.to_double()}};
}
inline nlohmann::json to_json(const ExtRational& r) {
  if (r.is_infinite()) return {{"value", "inf"}, {"approx", nullptr}};
  return to_json(r.value());
}

/// Flat `key: value` block.
inline std::string format_report(const CostReport& r) {
  std::ostringstream out;
  out << "expected_smart: " << format_value(r.expected_smart) << "\n";
  out << "cinf: " << (r.cinf ? format_value(*r.cinf) : std::string("n/a")) << "\n";
  for (const auto& [k, v] : r.expected_pro) out << "pro.K" << k << ": " << format_value(v) << "\n";
  out << "decision_probability: " << format_value(r.decision_probability) << "\n";
  out << "ratio: " << (r.ratio ? format_value(*r.ratio) : std::string("undefined")) << "\n";
  return out.str();
}

inline nlohmann::json report_json(const CostReport& r) {
  nlohmann::json j;
  j["expected_smart"] = to_json(r.expected_smart);
  j["cinf"] = r.cinf ? to_json(*r.cinf) : nlohmann::json(nullptr);
  for (const auto& [k, v] : r.expected_pro) j["pro.K" + std::to_string(k)] = to_json(v);
  j["decision_probability"] = to_json(r.decision_probability);
  j["ratio"] = r.ratio ? to_json(*r.ratio) : nlohmann::json(nullptr);
  return j;
}

}  // namespace selmon
