// Command-line driver: one subcommand per experiment.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "rsmm/csv.hpp"
#include "rsmm/experiments.hpp"

using namespace rsmm;

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> paths;
  std::optional<int> threads;
};

int run(const std::string& name, const Options& opt) {
  ExperimentConfig cfg;
  if (!opt.config.empty()) {
    std::ifstream f(opt.config);
    if (!f) {
      std::cerr << "error: cannot open config '" << opt.config << "'\n";
      return 2;
    }
    cfg = nlohmann::json::parse(f).get<ExperimentConfig>();
  }
  if (opt.seed) cfg.sim.seed = *opt.seed;
  if (opt.paths) cfg.sim.paths = *opt.paths;
  if (opt.threads) cfg.sim.threads = *opt.threads;

  ExperimentReport r = run_experiment(name, cfg);
  auto files = emit_report(r, opt.out);

  for (const auto& t : r.tables) {
    std::cout << t.caption << "\n";
    write_table_csv(std::cout, t);
    std::cout << "\n";
  }
  for (const auto& s : r.slopes)
    std::cout << "slope " << s.name << " = " << format_double(s.value) << "  (leave-one-out "
              << format_double(s.loo_min) << " .. " << format_double(s.loo_max) << ")\n";
  for (const auto& c : r.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << format_double(c.value) << " ["
              << c.spec.kind << " target=" << format_double(c.spec.target)
              << " tol=" << format_double(c.spec.tolerance) << "]\n";
  std::cout << "wrote " << files.size() << " files to " << opt.out << " in " << r.runtime_seconds << " s\n";
  return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-inventory risk-sensitive market making: numerical experiments"};
  app.require_subcommand(1);
  Options opt;
  std::string chosen;
  for (const auto& name : experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", opt.config, "JSON configuration file");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "Monte Carlo base seed");
    sub->add_option("--paths", opt.paths, "Monte Carlo path count");
    sub->add_option("--threads", opt.threads, "worker threads (0 = hardware concurrency)");
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI11_PARSE(app, argc, argv);
  try {
    return run(chosen, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
