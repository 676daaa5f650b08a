#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "selmon/model_format.hpp"
#include "selmon/product.hpp"

namespace testing_support {

inline std::string model_path(const std::string& name) { return std::string(SELMON_MODELS_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline selmon::ProductMc load_product(const std::string& name) {
  auto m = selmon::load_model(slurp(model_path(name)));
  return selmon::ProductMc(std::move(m.mc), std::move(m.dfa));
}

inline selmon::ProductMc product_of(const std::string& text) {
  auto m = selmon::load_model(text);
  return selmon::ProductMc(std::move(m.mc), std::move(m.dfa));
}

inline selmon::PairId pair_named(const selmon::ProductMc& p, const std::string& s, const std::string& q) {
  return p.pair(*p.mc().states().find(s), *p.dfa().states().find(q));
}

}  // namespace testing_support
