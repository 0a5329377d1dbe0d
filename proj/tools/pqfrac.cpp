/// @file pqfrac.cpp
/// @brief Command-line front end: pqfrac solve|verify|sweep --config <path>.
#include <iostream>

#include "CLI11.hpp"
#include "pqfrac/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Regularized (p,q)-Laplacian solver and regularity checks"};
  app.require_subcommand(1);
  pqfrac::CliOptions opt;
  std::string out_dir;
  std::uint64_t seed = 0;
  for (const char* name : {"solve", "verify", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides PQFRAC_OUT_DIR and the config)");
    sub->add_option("--jobs", opt.jobs, "sweep workers, 0 for all cores")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "random seed (overrides the config)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pqfrac::kExitConfig;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--out")) opt.out_dir = out_dir;
  if (sub->count("--seed")) opt.seed = seed;
  const std::string cmd = sub->get_name();
  if (cmd == "solve") return pqfrac::cmd_solve(opt, std::cout, std::cerr);
  if (cmd == "verify") return pqfrac::cmd_verify(opt, std::cout, std::cerr);
  return pqfrac::cmd_sweep(opt, std::cout, std::cerr);
}
