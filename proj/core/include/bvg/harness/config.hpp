#pragma once

#include "bvg/agd_plus.hpp"
#include "bvg/feasible_set.hpp"
#include "bvg/testbed.hpp"
#include "bvg/vec.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvg::harness {

inline constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent configuration. Maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output. Maps to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Algorithm { AgdExact, AgdSmoothed, Ingd, SubgradientBaseline };
std::string to_string(Algorithm a);

struct FunctionSpec {
  std::string name;
  ParamMap params;
};

/// Algorithm parameters. Fields not used by `kind` keep their defaults;
/// the parser rejects keys that do not belong to the chosen algorithm.
struct AlgorithmSpec {
  Algorithm kind = Algorithm::AgdExact;
  double eps = 0.1;
  /// Stop once f - f* <= stop_gap; defaults to eps when f* is known.
  std::optional<double> stop_gap;

  // AGD+ (both modes)
  ScheduleMode schedule = ScheduleMode::DeterministicBvg;
  /// Radius of the BVG constant in the deterministic schedule, or the
  /// smoothing radius in smoothed mode.
  std::optional<double> r;
  std::optional<double> lhat;
  double initial_step = 1.0;

  // AGD+ smoothed
  std::int64_t minibatch = 1;
  std::optional<double> beta;
  std::optional<double> lambda_r;
  std::optional<double> L_r;
  std::int64_t diagnostic_samples = 0;
  unsigned threads = 1;

  // INGD
  double delta = 0.1;
  std::optional<double> M;
  std::optional<std::int64_t> max_inner;
  double failure_beta = 0.1;
  bool adaptive_p = false;
  std::int64_t patience = 1000;

  // Subgradient baseline
  std::optional<double> step;
};

/// Parameters of the estimate-constants command.
struct ConstantsSpec {
  std::vector<double> radii;
  std::optional<Vec> center;
  double region_radius = 1.0;
  std::int64_t n_pairs = 10000;
  std::int64_t avg_points = 20;
  int rho_grid = 8;
  std::int64_t n_per_rho = 2000;
  unsigned threads = 1;
};

struct Budgets {
  std::int64_t iters = 1000;
  /// Limit on algorithmic oracle calls; 0 means none.
  std::int64_t oracle_calls = 0;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string experiment_id;
  FunctionSpec function;
  /// Explicit start point; when absent the start is `start_distance` along
  /// `start_direction` from the minimizer (or the origin).
  std::optional<Vec> x0;
  double start_distance = 1.0;
  /// "e1" or "diagonal".
  std::string start_direction = "e1";
  FeasibleSet set;
  std::optional<AlgorithmSpec> algorithm;
  /// Second algorithm for depth-compare; must be subgradient-baseline.
  std::optional<AlgorithmSpec> baseline;
  std::optional<ConstantsSpec> constants;
  std::vector<std::uint64_t> seeds{0};
  Budgets budgets;
  std::string outputs = "out";
  /// Compact JSON dump of the parsed document, used for hashing.
  std::string canonical;
};

/// Parses and validates a config document. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
/// Reads and parses a file. Throws IoError if unreadable, ConfigError if invalid.
ExperimentConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Builds the benchmark function; rethrows construction errors as ConfigError.
BenchFunction build_function(const ExperimentConfig& cfg);
/// Start point implied by the config for `fn`.
Vec start_point(const ExperimentConfig& cfg, const BenchFunction& fn);

}  // namespace bvg::harness
