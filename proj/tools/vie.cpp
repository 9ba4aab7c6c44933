// SPDX-License-Identifier: Apache-2.0
//
// vie solve --config <path> [--oracle] [--dump-fields <path>] [--out <csv>]
// vie sweep --configs <paths...> --out <csv> [--parallel]

#include <cstdio>
#include <iostream>
#include <CLI11.hpp>
#include "vie/driver.hpp"

namespace
{

void PrintRow(const vie::RunResult &r)
{
  if (!r.error.empty())
  {
    std::fprintf(stderr, "k/2pi=%g failed: %s\n", r.k_over_2pi, r.error.c_str());
    return;
  }
  std::printf("k/2pi=%g n=%d N=%lld setup=%.3fs apply=%.3es iter=%d solve=%.3fs "
              "prec_res=%.2e true_res=%.2e\n",
              r.k_over_2pi, r.grid.n, static_cast<long long>(r.grid.NumUnknowns()),
              r.t_setup_s, r.t_apply_s, r.stats.iterations, r.t_solve_s,
              r.stats.preconditioned_residual, r.stats.true_residual);
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Sparsifying-preconditioned volume integral equation solver"};
  app.require_subcommand(1);

  std::string config_path, dump_fields, out;
  bool oracle = false;
  auto *solve = app.add_subcommand("solve", "Run one experiment");
  solve->add_option("--config", config_path, "key = value config file")->required();
  solve->add_flag("--oracle", oracle, "Compare against the dense direct solution");
  solve->add_option("--dump-fields", dump_fields, "Write the total field here");
  solve->add_option("--out", out, "Append the result row to this CSV");

  std::vector<std::string> config_paths;
  std::string sweep_out;
  bool parallel = false;
  auto *sweep = app.add_subcommand("sweep", "Run several experiments into one CSV");
  sweep->add_option("--configs", config_paths, "Config files, one row each")->required();
  sweep->add_option("--out", sweep_out, "CSV output path")->required();
  sweep->add_flag("--parallel", parallel, "Run rows concurrently (VIE_THREADS caps workers)");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    // --help and friends exit 0; every usage error maps to the generic failure code.
    return app.exit(e) == 0 ? 0 : 1;
  }
  vie::ApplyThreadLimit();

  try
  {
    if (*solve)
    {
      vie::ExperimentConfig cfg = vie::LoadConfig(config_path);
      cfg.oracle = cfg.oracle || oracle;
      if (!dump_fields.empty())
        cfg.dump_fields = dump_fields;
      if (!out.empty())
        cfg.out = out;
      std::vector<vie::RunResult> rows{vie::Run(cfg)};
      PrintRow(rows[0]);
      if (cfg.oracle)
        std::printf("oracle max relative deviation: %.3e\n", rows[0].oracle_rel_diff);
      if (!cfg.out.empty())
        vie::WriteCsv(rows, cfg.out);
      return 0;
    }
    std::vector<vie::ExperimentConfig> configs;
    for (const auto &p : config_paths)
      configs.push_back(vie::LoadConfig(p));
    const auto rows = vie::Sweep(configs, parallel);
    bool failed = false;
    for (const auto &r : rows)
    {
      PrintRow(r);
      failed = failed || !r.error.empty();
    }
    vie::WriteCsv(rows, sweep_out);
    return failed ? 1 : 0;
  }
  catch (const std::exception &e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
