#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "selmon/cost.hpp"
#include "selmon/generate.hpp"
#include "selmon/model_format.hpp"
#include "selmon/report.hpp"

namespace selmon {

struct BatchEntry {
  std::uint64_t seed;
  Rational cinf;
  Rational expected_smart;
  Rational ratio;
  std::size_t classes;  // reachable language-equivalence classes (monitor size)
};

struct BatchResult {
  std::vector<BatchEntry> entries;
  std::size_t trivial = 0;  // generated models whose initial pair already decides

  double median_ratio() const {
    std::vector<Rational> r;
    for (const auto& e : entries) r.push_back(e.ratio);
    if (r.empty()) return std::nan("");
    std::sort(r.begin(), r.end());
    auto n = r.size();
    return n % 2 ? r[n / 2].to_double() : ((r[n / 2 - 1] + r[n / 2]) / Rational(2)).to_double();
  }
  double geometric_mean_ratio() const {
    if (entries.empty()) return std::nan("");
    double s = 0;
    for (const auto& e : entries) s += std::log(e.ratio.to_double());
    return std::exp(s / double(entries.size()));
  }
  double average_size() const {
    double s = 0;
    for (const auto& e : entries) s += double(e.classes);
    return entries.empty() ? 0.0 : s / double(entries.size());
  }
  std::size_t max_size() const {
    std::size_t m = 0;
    for (const auto& e : entries) m = std::max(m, e.classes);
    return m;
  }
  bool ratios_in_unit_interval() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const BatchEntry& e) { return e.ratio.sign() > 0 && e.ratio <= Rational(1); });
  }

  /// One summary row: Count, Avg-Size, Max-Size, Med, GAvg.
  std::string table(const std::string& name) const {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-12s %7s %9s %9s %6s %6s\n", "name", "Count", "Avg-Size", "Max-Size", "Med", "GAvg");
    out << buf;
    std::snprintf(buf, sizeof buf, "%-12s %7zu %9.0f %9zu %6.2f %6.2f\n", name.c_str(), entries.size(), average_size(),
                  max_size(), median_ratio(), geometric_mean_ratio());
    out << buf;
    return out.str();
  }
};

/// Generates non-hidden models from consecutive seeds until `count`
/// non-trivial ones (initial pair not deciding) are collected, and computes
/// cinf / E(C_smart) for each.
inline BatchResult batch_experiment(GenSpec spec, std::size_t count, std::size_t max_attempts = 0) {
  spec.non_hidden = true;
  if (max_attempts == 0) max_attempts = 100 * count + 100;
  BatchResult r;
  const std::uint64_t base = spec.seed;
  for (std::size_t i = 0; r.entries.size() < count; ++i) {
    if (i >= max_attempts) throw Error("batch: too many trivial models; adjust the generator parameters");
    spec.seed = base + i;
    auto model = load_model(generate_model(spec));
    ProductMc p(model.mc, model.dfa);
    NonHiddenAnalysis nh(p);
    if (nh.deciding(p.initial())) {
      ++r.trivial;
      continue;
    }
    auto smart = expected_smart_cost(p);
    auto cinf = compute_cinf(nh);
    r.entries.push_back({spec.seed, cinf, smart.value(), cinf / smart.value(), nh.num_reachable_classes()});
  }
  return r;
}

}  // namespace selmon
