// Command-line runner: `whilecc run ...` and `whilecc sweep ...`.
#include <CLI11.hpp>

#include <iostream>

#include "whilecc/cli.hpp"

namespace cli = whilecc::cli;

int main(int argc, char** argv) {
  CLI::App app{"WhileCC* interpreter"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  std::string format = "text";
  std::string seeds = "0..49", ns;
  unsigned threads = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("program,--program", cfg.program, "stdlib name or .wcc path")->required();
    sub->add_option("--proc", cfg.procedure, "procedure name");
    sub->add_option("--input", cfg.input, "input tuple, e.g. \"(1/2, [1,0,-2])\"");
    sub->add_option("--strategy", cfg.strategy, "dovetail[:seed] | oracle:seed | enumerate:maxnat:nodes");
    sub->add_option("--fuel", cfg.fuel, "step budget (default $WHILECC_FUEL_DEFAULT or 1000000)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "text | json-lines")->check(CLI::IsMember({"text", "json-lines"}));
  };

  CLI::App* run = app.add_subcommand("run", "run a procedure once");
  common(run);
  run->add_option("--n", cfg.n, "precision n");
  run->add_option("--seed", cfg.seed, "seed for dovetail or oracle choice");

  CLI::App* sweep = app.add_subcommand("sweep", "run over seeds and precisions");
  common(sweep);
  sweep->add_option("--seeds", seeds, "seed list, e.g. 0..49 or 1,5,9");
  sweep->add_option("--n,--ns", ns, "precision list, e.g. 1..10");
  sweep->add_option("--threads", threads, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  cfg.format = format == "json-lines" ? cli::Format::JsonLines : cli::Format::Text;

  try {
    if (*run) return cli::run(cfg, std::cout);
    std::vector<std::uint64_t> n_list = ns.empty() ? std::vector<std::uint64_t>{0} : cli::parse_list(ns);
    return cli::sweep(cfg, cli::parse_list(seeds), n_list, std::cout, threads);
  } catch (const cli::UsageError& e) {
    std::cerr << "whilecc: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "whilecc: error: " << e.what() << "\n";
    return 1;
  }
}
