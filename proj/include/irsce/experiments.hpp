#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irsce/beamforming.hpp"
#include "irsce/cascade.hpp"
#include "irsce/channel.hpp"
#include "irsce/solvers.hpp"

namespace irsce {

enum class Algorithm { omp, gamp, oracle_ls, conventional_ls };

std::string algorithm_name(Algorithm alg);
Algorithm algorithm_from_name(const std::string& name);

struct SolverSettings {
  int omp_max_support = 32;
  GampConfig gamp;
  int oracle_max_support = 32;
  PhaseOptConfig beamforming;  // seed is re-derived per trial
};

struct ExperimentConfig {
  UlaSpec ula{16, kDefaultSpacing};
  UpaSpec upa{8, 8};
  GridSpec grid{64, 32, 32};
  ChannelStatistics channel;
  bool on_grid = false;

  std::string axis_name = "T";  // "T" or "snr_db"
  std::vector<double> axis_values;
  double fixed_snr_db = 10.0;        // when sweeping T
  int fixed_t = 110;                 // when sweeping SNR
  int fixed_t_conventional_ls = 0;   // 0: use fixed_t
  bool noise_free = false;

  std::vector<Algorithm> algorithms;
  int trials = 100;
  std::uint64_t master_seed = 1;
  bool timing = true;
  OperatorMode operator_mode = OperatorMode::dense;
  SolverSettings solvers;
  std::string output_path;  // empty: keep results in memory only
};

/// Throws std::invalid_argument on violated invariants (empty axis, trials
/// < 1, conventional_ls paired with any T < N*M, unknown axis name).
void validate_config(const ExperimentConfig& config);

/// Strict parser for the JSON schema described in the README; unknown keys
/// are rejected at every level.
ExperimentConfig parse_config_json(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

ExperimentConfig preset_paper();
ExperimentConfig preset_sweep_t();
ExperimentConfig preset_sweep_snr();

struct MetricsRecord {
  std::string axis_name;
  double axis_value = 0.0;
  std::string algorithm;
  int trial = 0;
  std::uint64_t seed = 0;
  double nmse = 0.0;
  double arspr = 0.0;
  int iterations = 0;
  bool converged = true;
  double runtime_ms = 0.0;
};

struct CellAggregate {
  double axis_value = 0.0;
  std::string algorithm;
  int trials = 0;
  double mean_nmse = 0.0, se_nmse = 0.0;
  double mean_arspr = 0.0, se_arspr = 0.0;
  double mean_runtime_ms = 0.0;
};

struct SweepResult {
  std::vector<MetricsRecord> rows;
  std::vector<CellAggregate> aggregates;
};

/// Immutable per-config state shared across trials.
struct ExperimentContext {
  DictionarySet dicts;
  CascadeRepresentation rep;
};
ExperimentContext make_context(const ExperimentConfig& config);

std::uint64_t trial_seed(std::uint64_t master_seed, double axis_value, Algorithm alg,
                         int trial_index);

/// One Monte Carlo cell entry: draw channel, assemble measurements at the
/// cell's (T, SNR), solve, reconstruct and score. Noise level is set from the
/// trial's own average received pilot power: noise_var = E_signal / 10^(SNR/10).
MetricsRecord run_trial(const ExperimentConfig& config, double axis_value, Algorithm alg,
                        int trial_index);
MetricsRecord run_trial(const ExperimentContext& ctx, const ExperimentConfig& config,
                        double axis_value, Algorithm alg, int trial_index);

/// Runs axis x algorithms x trials. Rows are seeded independently of the
/// schedule, ordered axis-major, and flushed to the output CSV as soon as
/// their prefix completes, so results are identical for any worker count and
/// an interrupted run leaves a valid prefix on disk.
SweepResult run_sweep(const ExperimentConfig& config, int workers = 1);

std::string csv_header();
std::string csv_row(const MetricsRecord& rec);
void write_aggregates_json(const SweepResult& result, const std::string& axis_name,
                           const std::string& path);
std::string aggregates_path(const std::string& csv_path);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  double perturb_d_u = 0.0;  // fault injection for negative controls
};

/// Brute-force oracle checklist (dictionary redundancy, representation and
/// measurement identities, merge map, MIMO chain, rank-1 beamforming
/// optimum). All checks pass on a healthy build.
std::vector<CheckResult> verify_suite(const VerifyOptions& options = {});

// Regression-fixture helpers.
void dump_realization_json(const ChannelRealization& channel, const std::string& path);
ChannelRealization load_realization_json(const std::string& path);
void dump_lambda_json(const Eigen::MatrixXcd& lambda, const std::string& path);
Eigen::MatrixXcd load_lambda_json(const std::string& path);

}  // namespace irsce
