#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "irsce/experiments.hpp"

namespace {

void apply_overrides(irsce::ExperimentConfig& cfg, std::uint64_t seed, int trials,
                     const std::string& out, bool no_timing, bool on_grid,
                     const std::string& mode) {
  if (seed != 0) cfg.master_seed = seed;
  if (trials > 0) cfg.trials = trials;
  if (!out.empty()) cfg.output_path = out;
  if (no_timing) cfg.timing = false;
  if (on_grid) cfg.on_grid = true;
  if (mode == "dense") cfg.operator_mode = irsce::OperatorMode::dense;
  if (mode == "factored") cfg.operator_mode = irsce::OperatorMode::factored;
}

int execute(const irsce::ExperimentConfig& cfg, int parallel) {
  const irsce::SweepResult result = irsce::run_sweep(cfg, parallel);
  for (const irsce::CellAggregate& cell : result.aggregates)
    std::printf("%s=%-8g %-16s trials=%-4d mean_nmse=%.6g (se %.2g)  mean_arspr=%.6g (se %.2g)\n",
                cfg.axis_name.c_str(), cell.axis_value, cell.algorithm.c_str(),
                cell.trials, cell.mean_nmse, cell.se_nmse, cell.mean_arspr, cell.se_arspr);
  if (!cfg.output_path.empty())
    std::printf("rows: %zu -> %s (aggregates: %s)\n", result.rows.size(),
                cfg.output_path.c_str(), irsce::aggregates_path(cfg.output_path).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cascade channel estimation simulator for IRS-assisted mmWave links"};
  app.require_subcommand(1);

  std::string config_path, out_path, mode;
  std::uint64_t seed = 0;
  int trials = 0, parallel = 1;
  bool no_timing = false, on_grid = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "output CSV path");
    cmd->add_option("--seed", seed, "master seed override");
    cmd->add_option("--trials", trials, "trials per cell override");
    cmd->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--no-timing", no_timing, "write runtime_ms as 0 for reproducible bytes");
    cmd->add_flag("--on-grid", on_grid, "snap channel paths to the dictionary grid");
    cmd->add_option("--operator", mode, "operator backend: dense|factored")
        ->check(CLI::IsMember({"dense", "factored"}));
  };

  CLI::App* run = app.add_subcommand("run", "run a sweep described by a JSON config");
  run->add_option("--config", config_path, "JSON config file")->required();
  add_common(run);

  std::string preset = "paper";
  CLI::App* sweep_t = app.add_subcommand("sweep-t", "pilot-length sweep at fixed SNR");
  sweep_t->add_option("--preset", preset, "configuration preset")
      ->check(CLI::IsMember({"paper"}));
  add_common(sweep_t);

  CLI::App* sweep_snr = app.add_subcommand("sweep-snr", "SNR sweep at fixed pilot length");
  sweep_snr->add_option("--preset", preset, "configuration preset")
      ->check(CLI::IsMember({"paper"}));
  add_common(sweep_snr);

  CLI::App* verify = app.add_subcommand("verify", "run the built-in oracle checklist");

  std::string dump_path = "channel.json";
  CLI::App* dump = app.add_subcommand("dump-channel", "write one channel draw to JSON");
  dump->add_option("--out", dump_path, "output JSON path");
  dump->add_option("--seed", seed, "draw seed");
  dump->add_flag("--on-grid", on_grid, "snap the draw to the dictionary grid");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      irsce::ExperimentConfig cfg = irsce::load_config_file(config_path);
      apply_overrides(cfg, seed, trials, out_path, no_timing, on_grid, mode);
      return execute(cfg, parallel);
    }
    if (sweep_t->parsed()) {
      irsce::ExperimentConfig cfg = irsce::preset_sweep_t();
      cfg.output_path = "sweep_t.csv";
      apply_overrides(cfg, seed, trials, out_path, no_timing, on_grid, mode);
      return execute(cfg, parallel);
    }
    if (sweep_snr->parsed()) {
      irsce::ExperimentConfig cfg = irsce::preset_sweep_snr();
      cfg.output_path = "sweep_snr.csv";
      apply_overrides(cfg, seed, trials, out_path, no_timing, on_grid, mode);
      return execute(cfg, parallel);
    }
    if (verify->parsed()) {
      int failures = 0;
      for (const irsce::CheckResult& check : irsce::verify_suite()) {
        std::printf("[%s] %-32s %s\n", check.pass ? "PASS" : "FAIL", check.name.c_str(),
                    check.detail.c_str());
        if (!check.pass) ++failures;
      }
      return failures == 0 ? 0 : 1;
    }
    if (dump->parsed()) {
      const irsce::ExperimentConfig cfg = irsce::preset_paper();
      irsce::Rng rng(seed != 0 ? seed : 1);
      const irsce::ChannelRealization chan =
          on_grid ? irsce::sample_channel_on_grid(rng, cfg.channel, cfg.ula, cfg.upa,
                                                  cfg.grid)
                  : irsce::sample_channel(rng, cfg.channel, cfg.ula, cfg.upa);
      irsce::dump_realization_json(chan, dump_path);
      std::printf("wrote %s\n", dump_path.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
