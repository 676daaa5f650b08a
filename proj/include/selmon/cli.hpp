#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "selmon/batch.hpp"
#include "selmon/cost.hpp"
#include "selmon/generate.hpp"
#include "selmon/model_format.hpp"
#include "selmon/monitor_format.hpp"
#include "selmon/nonhidden.hpp"
#include "selmon/qualitative.hpp"
#include "selmon/report.hpp"
#include "selmon/simulation.hpp"

namespace selmon::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInput = 2, kCapacity = 3, kCapability = 4 };

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

inline SkipBound parse_bound(const std::string& s) {
  if (s == "inf") return kUnbounded;
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw CLI::ValidationError("-K", "expected a non-negative integer or 'inf'");
  }
  return std::stoull(s);
}

inline std::vector<std::uint64_t> parse_k_list(const std::string& s) {
  std::vector<std::uint64_t> ks;
  std::stringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) {
    auto k = parse_bound(tok);
    if (!k) throw CLI::ValidationError("--k-sweep", "K values must be finite");
    ks.push_back(*k);
  }
  return ks;
}

struct Loaded {
  Model model;
  ProductMc product;
};

inline Loaded load(const std::string& path) {
  auto m = load_model(read_file(path));
  ProductMc p(m.mc, m.dfa);
  return {std::move(m), std::move(p)};
}

inline int cmd_validate(const std::string& path, bool json, std::ostream& out) {
  auto l = load(path);
  const auto& mc = l.model.mc;
  if (json) {
    out << nlohmann::json{{"valid", true},
                          {"states", mc.num_states()},
                          {"letters", mc.num_letters()},
                          {"dfa_states", l.model.dfa.num_states()},
                          {"non_hidden", is_non_hidden(mc)}}
               .dump(2)
        << "\n";
  } else {
    out << "valid: " << mc.num_states() << " states, " << mc.num_letters() << " letters, " << l.model.dfa.num_states()
        << " dfa states" << (is_non_hidden(mc) ? ", non-hidden" : ", hidden") << "\n";
  }
  return kOk;
}

inline int cmd_analyze(const std::string& path, const std::string& dot_path, bool json, AnalysisLimits limits,
                       std::ostream& out) {
  auto l = load(path);
  const auto& p = l.product;
  BeliefAnalyzer an(p, limits);
  auto b0 = an.initial_belief();
  bool non_hidden = is_non_hidden(p.mc());
  bool diag = !an.is_confused(b0);
  bool fin = an.is_finitary(b0);
  std::size_t pos = 0, neg = 0, und = 0;
  for (auto x : reachable_pairs(p, p.initial())) {
    switch (an.pair_class(x)) {
      case PairClass::PositivelyDeciding: ++pos; break;
      case PairClass::NegativelyDeciding: ++neg; break;
      case PairClass::Undecided: ++und; break;
    }
  }
  std::optional<std::size_t> classes;
  std::optional<Cras> cras0;
  if (non_hidden) {
    NonHiddenAnalysis nh(p);
    classes = nh.num_reachable_classes();
    cras0 = nh.cras(p.initial());
  }
  if (!dot_path.empty()) {
    auto g = an.build_belief_graph({{p.mc().initial(), b0}});
    write_file(dot_path, g.to_dot(p));
  }
  if (json) {
    nlohmann::json j{{"non_hidden", non_hidden},
                     {"diagnosable", diag},
                     {"cinf_finite", fin},
                     {"pairs", {{"positive", pos}, {"negative", neg}, {"undecided", und}}}};
    if (classes) j["equivalence_classes"] = *classes;
    if (cras0) j["cras_initial"] = cras0->str();
    out << j.dump(2) << "\n";
  } else {
    out << "non-hidden: " << (non_hidden ? "yes" : "no") << "\n";
    out << "diagnosable: " << (diag ? "yes" : "no") << "\n";
    out << "cinf finite: " << (fin ? "yes" : "no") << "\n";
    out << "reachable pairs: " << pos << " positive, " << neg << " negative, " << und << " undecided\n";
    if (classes) out << "equivalence classes: " << *classes << "\n";
    if (cras0) out << "cras(initial): " << cras0->str() << "\n";
  }
  return kOk;
}

inline int cmd_classify(const std::string& path, const std::string& prefix, bool json, AnalysisLimits limits,
                        std::ostream& out) {
  auto l = load(path);
  const auto& p = l.product;
  auto obs = parse_prefix(p, prefix);
  BeliefAnalyzer an(p, limits);
  auto b = an.nfa().run(an.initial_belief(), obs);
  auto c = an.classify(b);
  if (json) {
    out << nlohmann::json{{"prefix", prefix},
                          {"belief", belief_to_string(p, b)},
                          {"enabled", c.enabled},
                          {"positively_deciding", c.positively_deciding},
                          {"negatively_deciding", c.negatively_deciding},
                          {"confused", c.confused},
                          {"very_confused", c.very_confused},
                          {"finitary", c.finitary}}
               .dump(2)
        << "\n";
  } else {
    auto yn = [](bool v) { return v ? "yes" : "no"; };
    out << "belief: " << belief_to_string(p, b) << "\n";
    out << "enabled: " << yn(c.enabled) << "\n";
    out << "positively deciding: " << yn(c.positively_deciding) << "\n";
    out << "negatively deciding: " << yn(c.negatively_deciding) << "\n";
    out << "confused: " << yn(c.confused) << "\n";
    out << "very confused: " << yn(c.very_confused) << "\n";
    out << "finitary: " << yn(c.finitary) << "\n";
  }
  return kOk;
}

inline int cmd_compile(const std::string& path, const std::string& k, const std::string& output, bool json,
                       std::ostream& out) {
  auto l = load(path);
  NonHiddenAnalysis nh(l.product);
  auto table = compile_monitor(nh, parse_bound(k));
  auto text = write_monitor(table);
  if (output.empty() || output == "-") {
    out << text;
    return kOk;
  }
  write_file(output, text);
  std::size_t verdicts = 0;
  for (const auto& n : table.nodes) verdicts += n.verdict.has_value();
  if (json) {
    out << nlohmann::json{{"output", output}, {"nodes", table.nodes.size()}, {"verdict_nodes", verdicts}}.dump(2) << "\n";
  } else {
    out << "wrote " << output << ": " << table.nodes.size() << " nodes, " << verdicts << " verdict nodes\n";
  }
  return kOk;
}

inline int cmd_cost(const std::string& path, const std::string& sweep, bool see_all_only, bool json,
                    AnalysisLimits limits, std::ostream& out) {
  auto l = load(path);
  const auto& p = l.product;
  if (!is_non_hidden(p.mc()) && !see_all_only) {
    throw CapabilityError("the chain is hidden: cinf and procrastination costs need a non-hidden chain "
                          "(use --see-all-only for the see-all quantities)");
  }
  auto ks = sweep.empty() ? default_k_sweep() : parse_k_list(sweep);
  if (see_all_only) ks.clear();
  CostReport r;
  if (see_all_only) {
    r.decision_probability = decision_probability(p, limits);
    r.expected_smart = expected_smart_cost(p, limits);
  } else {
    r = cost_report(p, ks, limits);
  }
  if (json) {
    out << report_json(r).dump(2) << "\n";
  } else {
    out << format_report(r);
  }
  return kOk;
}

struct SimulateArgs {
  std::vector<std::string> policies;
  std::uint64_t k = 8;
  std::string monitor;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::uint64_t max_steps = 1000;
};

inline int cmd_simulate(const std::string& path, const SimulateArgs& a, bool json, AnalysisLimits limits,
                        std::ostream& out) {
  auto l = load(path);
  const auto& p = l.product;
  std::vector<Policy> policies;
  for (const auto& name : a.policies) {
    if (name == "seeall") {
      policies.push_back(Policy::seeall());
    } else if (name == "smart") {
      policies.push_back(Policy::smart());
    } else if (name == "pro") {
      NonHiddenAnalysis nh(p);
      policies.push_back(Policy::monitor("pro.K" + std::to_string(a.k), compile_monitor(nh, a.k), p));
    } else {
      throw CLI::ValidationError("--policy", "unknown policy '" + name + "'");
    }
  }
  if (!a.monitor.empty()) policies.push_back(Policy::monitor("monitor", load_monitor(read_file(a.monitor)), p));
  Simulator sim(p, limits);
  auto r = sim.simulate(policies, a.trials, a.seed, a.max_steps);
  if (json) {
    out << r.to_json().dump(2) << "\n";
    return kOk;
  }
  out << "trials: " << r.trials << "\nseed: " << r.seed << "\n";
  for (const auto& s : r.policies) {
    out << s.name << ": mean_cost " << (s.cost_samples ? decimal(s.mean_cost()) : std::string("n/a")) << " stddev "
        << decimal(s.stddev()) << " decided " << s.decided << " undecided " << s.undecided << " (truncated "
        << s.truncated << ") yes " << s.yes << " no " << s.no << " incorrect " << s.incorrect << "\n";
  }
  return kOk;
}

inline int cmd_gen(const GenSpec& spec, const std::string& flowgraph, const std::string& output, std::ostream& out) {
  std::string text;
  if (!flowgraph.empty()) {
    if (spec.property.empty()) throw CLI::ValidationError("--property", "required with --flowgraph");
    text = flowgraph_model(load_flowgraph(read_file(flowgraph)), spec.alpha, spec.seed, spec.property);
  } else {
    text = generate_model(spec);
  }
  load_model(text);  // generated text must load
  if (output.empty() || output == "-") {
    out << text;
  } else {
    write_file(output, text);
  }
  return kOk;
}

inline int cmd_batch(const GenSpec& spec, std::size_t count, const std::string& name, bool verbose, bool json,
                     std::ostream& out) {
  auto r = batch_experiment(spec, count);
  if (json) {
    nlohmann::json j{{"name", name},
                     {"count", r.entries.size()},
                     {"trivial_skipped", r.trivial},
                     {"avg_size", r.average_size()},
                     {"max_size", r.max_size()},
                     {"median", r.median_ratio()},
                     {"gavg", r.geometric_mean_ratio()},
                     {"ratios_in_unit_interval", r.ratios_in_unit_interval()}};
    if (verbose) {
      j["models"] = nlohmann::json::array();
      for (const auto& e : r.entries) {
        j["models"].push_back({{"seed", e.seed},
                               {"cinf", e.cinf.str()},
                               {"expected_smart", e.expected_smart.str()},
                               {"ratio", e.ratio.str()},
                               {"classes", e.classes}});
      }
    }
    out << j.dump(2) << "\n";
    return kOk;
  }
  if (verbose) {
    for (const auto& e : r.entries) {
      out << "seed " << e.seed << ": cinf " << format_value(e.cinf) << " smart " << format_value(e.expected_smart)
          << " ratio " << decimal(e.ratio.to_double()) << " classes " << e.classes << "\n";
    }
  }
  out << r.table(name);
  out << "trivial models skipped: " << r.trivial << "\n";
  out << "all ratios in (0,1]: " << (r.ratios_in_unit_interval() ? "yes" : "no") << "\n";
  return kOk;
}

/// Entry point; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Selective monitoring for labelled Markov chains"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  std::size_t max_nodes = AnalysisLimits{}.max_nodes;
  app.add_flag("--json", json, "Machine-readable output");
  app.add_option("--max-nodes", max_nodes, "Cap on explored belief nodes");

  std::string file, dot, prefix, k = "inf", output, sweep;
  bool see_all_only = false;

  auto* validate = app.add_subcommand("validate", "Parse and validate a model");
  validate->add_option("file", file)->required();

  auto* analyze = app.add_subcommand("analyze", "Qualitative analysis");
  analyze->add_option("file", file)->required();
  analyze->add_option("--dot", dot, "Write the belief graph in DOT format");

  auto* classify = app.add_subcommand("classify", "Classify an observation prefix");
  classify->add_option("file", file)->required();
  classify->add_option("--prefix", prefix, "Comma-separated letters, '_' for a skip")->required();

  auto* compile = app.add_subcommand("compile", "Compile a procrastination monitor");
  compile->add_option("file", file)->required();
  compile->add_option("-K", k, "Skip bound (integer or inf)")->required();
  compile->add_option("-o,--output", output, "Monitor file (stdout if omitted)");

  auto* cost = app.add_subcommand("cost", "Exact expected observation costs");
  cost->add_option("file", file)->required();
  cost->add_option("--k-sweep", sweep, "Comma-separated K values");
  cost->add_flag("--see-all-only", see_all_only, "Only see-all quantities (allowed on hidden chains)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo simulation of policies");
  simulate->add_option("file", file)->required();
  simulate->add_option("--policy", sa.policies, "seeall, smart or pro (repeatable)");
  simulate->add_option("--K", sa.k, "Skip bound of the pro policy");
  simulate->add_option("--monitor", sa.monitor, "Also run a compiled monitor file");
  simulate->add_option("--trials", sa.trials)->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sa.seed);
  simulate->add_option("--max-steps", sa.max_steps)->check(CLI::PositiveNumber);

  GenSpec gs;
  bool hidden = false;
  std::string flowgraph;
  auto add_gen_options = [&](CLI::App* c) {
    c->add_option("--states", gs.states);
    c->add_option("--letters", gs.letters, "Letter count (hidden chains)");
    c->add_option("--degree", gs.out_degree, "Out-degree bound");
    c->add_option("--alpha", gs.alpha, "Dirichlet concentration");
    c->add_option("--seed", gs.seed);
    c->add_option("--sinks", gs.sinks, "Number of absorbing states");
    c->add_option("--property", gs.property, "iterator | reach_letter(a) | parity_position(a,m)");
  };
  auto* gen = app.add_subcommand("gen", "Generate a random model");
  add_gen_options(gen);
  gen->add_flag("--hidden", hidden, "Allow letters that do not determine the target");
  gen->add_option("--flowgraph", flowgraph, "Attach Dirichlet probabilities to a flowgraph file");
  gen->add_option("-o,--output", output);

  std::size_t count = 100;
  std::string name = "generated";
  bool verbose = false;
  auto* batch = app.add_subcommand("batch", "Cost ratios over generated non-hidden models");
  add_gen_options(batch);
  batch->add_option("--count", count);
  batch->add_option("--name", name, "Row label");
  batch->add_flag("-v,--verbose", verbose);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  AnalysisLimits limits{max_nodes};
  try {
    if (*validate) return cmd_validate(file, json, out);
    if (*analyze) return cmd_analyze(file, dot, json, limits, out);
    if (*classify) return cmd_classify(file, prefix, json, limits, out);
    if (*compile) return cmd_compile(file, k, output, json, out);
    if (*cost) return cmd_cost(file, sweep, see_all_only, json, limits, out);
    if (*simulate) return cmd_simulate(file, sa, json, limits, out);
    if (*gen) {
      gs.non_hidden = !hidden;
      return cmd_gen(gs, flowgraph, output, out);
    }
    if (*batch) return cmd_batch(gs, count, name, verbose, json, out);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kInput;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kInput;
  } catch (const CapacityError& e) {
    err << "analysis cap exceeded: " << e.what() << "\n";
    return kCapacity;
  } catch (const CapabilityError& e) {
    err << "not supported: " << e.what() << "\n";
    return kCapability;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInput;
  }
  return kUsage;
}

}  // namespace selmon::cli
