#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "app/app.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"rinorm: rearrangement-invariant norms, Poincare inequalities and doubling"};
  cli.require_subcommand(1);
  rinorm::app::RunOptions opt;
  std::int64_t seed = -1;
  const std::map<std::string, std::string> about{
      {"norm", "evaluate global and local RI norms of a function"},
      {"rearrange", "decreasing rearrangement and distribution function"},
      {"indices", "Zippin indices of fundamental functions"},
      {"ermakoff", "Ermakoff test traces for gain functions"},
      {"doubling", "per-ball doubling ratios and the doubling constant"},
      {"poincare", "empirical RI Poincare constant"},
      {"certify", "radii, key inequality and induction certificate"}};
  for (const auto& name : rinorm::app::subcommands()) {
    auto* sub = cli.add_subcommand(name, about.at(name));
    sub->add_option("--config", opt.config, "YAML run configuration")->required();
    sub->add_option("--out", opt.out, "output directory (created if missing)");
    sub->add_option("--seed", seed, "seed for randomized test families")->check(CLI::NonNegativeNumber);
    sub->add_option("--grid-scale", opt.grid_scale, "refinement factor for estimator grids")
        ->check(CLI::PositiveNumber);
    sub->callback([&opt, name] { opt.command = name; });
  }
  CLI11_PARSE(cli, argc, argv);
  if (seed >= 0) opt.seed = static_cast<std::uint64_t>(seed);
  return rinorm::app::run(opt, std::cerr);
}
