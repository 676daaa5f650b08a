// Loads a model, reports what a monitor can decide and what it costs, and
// compiles a procrastination monitor when the chain is non-hidden.
//
//   quickstart ../models/procrastinate_loop.model

#include <fstream>
#include <iostream>
#include <sstream>

#include "selmon/cost.hpp"
#include "selmon/model_format.hpp"
#include "selmon/monitor_format.hpp"
#include "selmon/nonhidden.hpp"
#include "selmon/qualitative.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: quickstart <model-file>\n";
    return 1;
  }
  std::ifstream in(argv[1]);
  if (!in) {
    std::cerr << "cannot open " << argv[1] << "\n";
    return 2;
  }
  std::stringstream text;
  text << in.rdbuf();

  try {
    auto model = selmon::load_model(text.str());
    selmon::ProductMc p(model.mc, model.dfa);

    std::cout << "diagnoser exists: " << (selmon::diagnoser_exists(p) ? "yes" : "no") << "\n";
    std::cout << "decision probability: " << selmon::decision_probability(p) << "\n";
    std::cout << "expected cost (observe all): " << selmon::expected_smart_cost(p).str() << "\n";

    if (!selmon::is_non_hidden(p.mc())) return 0;
    selmon::NonHiddenAnalysis nh(p);
    std::cout << "cinf: " << selmon::compute_cinf(nh) << "\n";
    for (std::uint64_t k : {0, 1, 4}) std::cout << "K=" << k << ": " << selmon::expected_pro_cost(nh, k) << "\n";
    std::cout << "\n" << selmon::write_monitor(selmon::compile_monitor(nh, 4));
  } catch (const selmon::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
