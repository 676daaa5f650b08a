#pragma once

// Small random models for property tests. Probabilities are small integer
// weights normalized per state, so every edge has probability >= 1/(4*deg).

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "selmon/model_format.hpp"

namespace testing_support {

struct RandomModelSpec {
  int max_states = 3;
  int max_letters = 2;
  int max_dfa_states = 2;  // without the accepting state
  int max_degree = 3;
  bool non_hidden = false;
};

inline std::string random_model_text(std::mt19937_64& rng, const RandomModelSpec& spec) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int ns = uni(1, spec.max_states);
  int nl = spec.non_hidden ? ns : uni(1, spec.max_letters);
  std::string t = "[mc]\ninitial s0\n";
  std::vector<int> used(nl, 0);
  for (int s = 0; s < ns; ++s) {
    int deg = uni(1, std::min(spec.max_degree, spec.non_hidden ? ns : ns * nl));
    std::vector<std::pair<int, int>> edges;  // (letter, target)
    while (static_cast<int>(edges.size()) < deg) {
      int target = uni(0, ns - 1);
      int letter = spec.non_hidden ? target : uni(0, nl - 1);
      std::pair<int, int> e{letter, target};
      if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
    }
    std::vector<int> w(deg);
    int total = 0;
    for (auto& x : w) total += (x = uni(1, 4));
    for (int i = 0; i < deg; ++i) {
      used[edges[i].first] = 1;
      t += "trans s" + std::to_string(s) + " a" + std::to_string(edges[i].first) + " " + std::to_string(w[i]) + "/" +
           std::to_string(total) + " s" + std::to_string(edges[i].second) + "\n";
    }
  }
  int nq = uni(1, spec.max_dfa_states);
  t += "[dfa]\ninitial q0\naccepting f\n";
  for (int q = 0; q < nq; ++q) {
    for (int a = 0; a < nl; ++a) {
      if (!used[a]) continue;
      int r = uni(0, nq);  // nq means f
      t += "trans q" + std::to_string(q) + " a" + std::to_string(a) + " " + (r == nq ? "f" : "q" + std::to_string(r)) + "\n";
    }
  }
  return t;
}

inline selmon::Model random_model(std::mt19937_64& rng, const RandomModelSpec& spec) {
  return selmon::load_model(random_model_text(rng, spec));
}

}  // namespace testing_support
