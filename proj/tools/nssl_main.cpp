/// @file nssl_main.cpp
/// @brief Command-line wrapper around nssl::run.
#include "CLI11.hpp"

#include "nssl/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "nssl: local norms, scale-invariant quantities, and regularity "
      "detectors on sampled velocity/pressure fields"};
  app.require_subcommand(1);
  app.fallthrough();

  nssl::RunConfig config;
  app.add_option("--input", config.input, "input file (NSSF1 field, or spec JSON for gen)");
  app.add_option("--output", config.output, "output path (stdout when omitted)");
  app.add_option("--delta", config.delta, "Morrey time-norm threshold");
  app.add_option("--eps-star", config.eps_star, "dyadic descent stop threshold");
  app.add_option("--delta-star", config.delta_star,
                 "concentration threshold (0: delta divided by the calibrated embedding constant)");
  app.add_option("--c-cal", config.c_cal, "decay constant (0: calibrated default)");
  app.add_option("--jobs", config.jobs, "scan worker count (0: hardware concurrency)");
  auto* seed_opt = app.add_option("--seed", config.seed, "seed for generation and verification");
  app.add_option("--lattice", config.lattice_json, "lattice JSON (see README)");

  app.add_subcommand("gen", "generate a synthetic field and write it as NSSF1");
  app.add_subcommand("norms", "weak/Morrey/time-Lorentz norms over a lattice, as CSV");
  app.add_subcommand("invariants", "scale-invariant quantities over a lattice, as JSON lines");
  app.add_subcommand("scan", "run the detectors over a lattice, as JSON lines");
  app.add_subcommand("verify", "run the property-oracle suites and report pass/fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  config.command = app.get_subcommands().front()->get_name();
  config.seed_given = seed_opt->count() > 0;
  return nssl::run(config);
}
