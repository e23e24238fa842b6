#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eislab/app/experiment.hpp"
#include "eislab/core/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Comparative statics of consumption under recursive preferences"};
  app.require_subcommand(1);
  eislab::ExperimentOptions opt;
  for (const auto& name : eislab::experiment_commands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->required();
    sub->add_option("--seed", opt.seed, "random seed")->default_val(0);
    sub->callback([&opt, name] { opt.command = name; });
  }
  CLI11_PARSE(app, argc, argv);
  try {
    opt.workers = eislab::workers_from_env();
  } catch (const eislab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return eislab::run_experiment(opt, std::cout, std::cerr);
}
