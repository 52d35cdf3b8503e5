#pragma once

#include "bvg/harness/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bvg::harness {

struct RoundsReport {
  std::int64_t sequential_rounds = 0;
  std::int64_t total_oracle_calls = 0;
  std::int64_t queries_outside_unit_ball = 0;
};

/// Result of one seed of one algorithm.
struct SeedRun {
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::AgdExact;
  /// "completed", "target-reached", "budget-exhausted", or an INGD status.
  std::string status;
  /// Trajectory CSV (header plus one row per iteration).
  std::string csv;
  RoundsReport rounds;
  /// f(final point) - f*, NaN when f* is unknown.
  double final_gap = 0.0;
  double final_value = 0.0;
  /// Gap certificate G_k of the last iterate (AGD+ with a ledger), else NaN.
  double final_certificate = 0.0;
  std::int64_t iterations = 0;
  /// INGD only.
  bool certificate_valid = false;
  std::int64_t descent_steps = 0;
  double g_norm = 0.0;
};

/// Runs one seed of `spec` in memory.
SeedRun run_seed(const ExperimentConfig& cfg, const AlgorithmSpec& spec, std::uint64_t seed);

/// One JSON object (single line, no trailing newline) summarising a seed.
std::string summary_json(const ExperimentConfig& cfg, const SeedRun& run);

struct RunOptions {
  /// Overrides cfg.outputs when non-empty.
  std::filesystem::path out_dir;
  bool quiet = true;
};

struct RunReport {
  std::filesystem::path out_dir;
  std::vector<SeedRun> runs;
};

/// `run`: one trajectory CSV per seed, summary.jsonl and manifest.json.
RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct DepthReport {
  std::uint64_t seed = 0;
  SeedRun smoothed;
  SeedRun baseline;
  /// baseline rounds / smoothed rounds.
  double round_ratio = 0.0;
};

/// Runs the algorithm and the baseline to the same target gap from the same
/// start. Throws ConfigError when the two targets differ.
std::vector<DepthReport> depth_comparison(const ExperimentConfig& cfg);
/// Runs depth_comparison and writes depth.csv, per-method trajectories,
/// summary.jsonl and manifest.json.
RunReport run_depth_comparison(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct ConstantsRow {
  double r = 0.0;
  double lhat_estimate = 0.0;
  double lhat_tabulated = 0.0;
  double lavg_estimate = 0.0;
  double lavg_stderr = 0.0;
};

/// Monte Carlo BVG_max / BVG_avg estimates on the configured radius grid.
std::vector<ConstantsRow> estimate_constants(const ExperimentConfig& cfg, std::uint64_t seed);
/// Writes constants_seed<N>.csv per seed and manifest.json.
RunReport run_estimate_constants(const ExperimentConfig& cfg, const RunOptions& opt = {});

}  // namespace bvg::harness
