#pragma once

#include "bvg/agd_plus.hpp"
#include "bvg/feasible_set.hpp"
#include "bvg/oracle.hpp"
#include "bvg/vec.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace bvg::harness {

struct SubgradientOptions {
  FeasibleSet set;
  Vec x0;
  /// Constant step; the usual choice is eps / M^2.
  double step = 0.1;
  std::int64_t iters = 1000;
  /// 0 means no limit.
  std::int64_t max_oracle_calls = 0;
  std::optional<double> f_star;
  /// Stop once the best value seen is within stop_gap of f_star.
  std::optional<double> stop_gap;
};

struct SubgradientRecord {
  std::int64_t k = 0;
  double f_x = 0.0;
  double best_f = 0.0;
  std::int64_t oracle_calls_total = 0;
};

struct SubgradientResult {
  std::vector<SubgradientRecord> records;
  RunStatus status = RunStatus::Completed;
  Vec best_x;
  double best_f = 0.0;
  std::int64_t oracle_calls = 0;
  std::int64_t rounds = 0;
  std::int64_t queries_outside_unit_ball = 0;
};

/// Projected subgradient method x+ = project(x - step * gamma(x)); one query
/// per round. Record k describes the k-th queried point.
SubgradientResult run_subgradient(const Oracle& o, const SubgradientOptions& opt);

}  // namespace bvg::harness
