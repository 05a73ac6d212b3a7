#include <iostream>

#include <CLI11.hpp>

#include "evokit/cli.hpp"

int main(int argc, char** argv) {
  evokit::RunConfig cfg;
  std::string format = "text";
  std::size_t bit_cap = 0;

  CLI::App app{"evokit: computations in evolution algebras"};
  app.require_subcommand(1);
  for (const auto& name : evokit::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("inputs", cfg.inputs, "algebra or permutation JSON files");
    sub->add_option("--batch", cfg.batch_dir, "process every *.json file in this directory");
    sub->add_option("--tol", cfg.tol, "float tolerance (default 1e-9)");
    sub->add_option("--depth", cfg.depth, "plenary depth K (default 12)");
    sub->add_option("--seed", cfg.seed, "seed for randomized searches");
    sub->add_option("--attempts", cfg.attempts, "restarts for randomized searches");
    sub->add_option("--format", format, "text | machine")->check(CLI::IsMember({"text", "machine"}));
    sub->add_option("--x", cfg.x, "comma-separated coordinates of x");
    sub->add_option("--y", cfg.y, "comma-separated coordinates of y");
    sub->add_option("--k", cfg.k, "plenary power index (default 2)");
    sub->add_option("--index", cfg.index, "generator for period, 1-based (default: all)");
    sub->add_option("--bitcap", bit_cap, "rational bit-size cap (overrides EVOKIT_BITCAP)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  cfg.format = format == "machine" ? evokit::OutputFormat::machine : evokit::OutputFormat::text;
  if (bit_cap > 0) cfg.bit_cap = bit_cap;
  return evokit::run(cfg, std::cout, std::cerr);
}
