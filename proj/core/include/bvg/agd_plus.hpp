#pragma once

#include "bvg/feasible_set.hpp"
#include "bvg/oracle.hpp"
#include "bvg/rng.hpp"
#include "bvg/testbed.hpp"
#include "bvg/vec.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bvg {

/// Iterates of AGD+ after k steps. Before the first step A = 0 and
/// z = v = x0, so the first query point is x0 itself.
struct AgdState {
  std::int64_t k = 0;
  Vec x0;
  Vec x;       // query point of the last step
  Vec y;       // output sequence
  Vec z;       // unprojected dual iterate
  Vec v;       // project(z)
  Vec v_prev;  // project(z) before the last step
  double a = 0.0;
  double A = 0.0;
};

AgdState agd_init(const Vec& x0, const FeasibleSet& set);

/// Query point for a step of size a: (A/(A+a)) y + (a/(A+a)) v.
Vec agd_query_point(const AgdState& s, double a);

/// One AGD+ step. g must be the estimate at agd_query_point(s, a).
AgdState agd_step(const AgdState& s, const Vec& g, double a, const FeasibleSet& set);

/// min{eps / lhat^2, (r / lhat)(1 + sqrt(1 + 4 A_prev lhat / r)) / 2}.
double det_step_size(double A_prev, double eps, double lhat, double r);

/// a_0 = beta; otherwise the positive root of a^2 = beta (A_prev + a).
double stochastic_step_size(std::int64_t k, double A_prev, double beta);

/// (eps^3 / (M^3 D^2))^(1 / (1 + 3 kappa)).
double weak_smooth_radius(double M, double kappa, double D, double eps);

/// lhat^2 D^2 / eps^2 + sqrt(lhat / (r eps)) D.
double deterministic_iteration_bound(double lhat, double r, double D, double eps);

/// min{1 / lambda, D / (sqrt(L_r lhat) K^(3/2))}; D and K must be supplied
/// up front although they depend on the run.
double smoothed_beta(double lambda, double D, double L_r, double lhat, std::int64_t K);

struct ErrorTerms {
  double E_s = 0.0;
  double E_b = 0.0;
  double E_v = 0.0;
  double total() const { return E_s + E_b + E_v; }
};

/// Error terms of the step that produced `s`, given f and gamma at s.x, f(s.y),
/// the estimate g used in the step, and the reference point w.
ErrorTerms error_terms(const AgdState& s, double f_x, const Vec& gamma_x, double f_y, const Vec& g, const Vec& w);

struct BacktrackResult {
  double a = 0.0;
  int halvings = 0;
  AgdState state;
  OracleResult at_x;
  double f_y = 0.0;
  double E_s = 0.0;
};

/// Starting from a_proposed, halves the step until the exact-oracle E_s of the
/// resulting step is at most a eps / 2. Two oracle calls per trial. Throws
/// std::runtime_error if the step drops below 1e-300.
BacktrackResult backtrack_step(const Oracle& o, const AgdState& s, double a_proposed, double eps,
                               const FeasibleSet& set);

enum class ScheduleMode { DeterministicBvg, Backtracking, StochasticBeta };

struct ScheduleConfig {
  ScheduleMode mode = ScheduleMode::DeterministicBvg;
  double eps = 0.1;
  double r = 0.1;
  double lhat = 1.0;
  std::optional<double> lambda_r;
  std::optional<double> beta;
  /// Backtracking: first proposal; later proposals double the previous a^2 / A.
  double initial_step = 1.0;
};

enum class GradMode { Exact, Smoothed };

struct AgdOptions {
  FeasibleSet set;
  Vec x0;
  ScheduleConfig schedule;
  GradMode grad_mode = GradMode::Exact;
  /// Smoothing radius and minibatch size for smoothed mode.
  double smoothing_r = 0.1;
  std::int64_t minibatch = 1;
  std::int64_t iters = 100;
  /// Limit on algorithmic oracle calls; 0 means none.
  std::int64_t max_oracle_calls = 0;
  /// Reference point for the ledger; without it only f(y_k) is reported.
  std::optional<Vec> w;
  /// Known optimal value; enables stop_gap.
  std::optional<double> f_star;
  /// Stop once f(y_k) - f_star <= stop_gap.
  std::optional<double> stop_gap;
  /// Smoothed mode: samples per iteration for the ledger against f_r
  /// (0 disables the ledger there).
  std::int64_t diagnostic_samples = 0;
  RngStream rng{0};
  unsigned threads = 1;
};

struct AgdRecord {
  std::int64_t k = 0;
  double a = 0.0;
  double A = 0.0;
  double f_y = 0.0;
  /// (1/2 ||w - x0||^2 + sum E_i) / A_k.
  double gap_bound = 0.0;
  double G = 0.0;
  /// A_k G_k, kept for telescoping checks.
  double AG = 0.0;
  ErrorTerms E;
  /// Standard errors of the E terms (smoothed mode only).
  ErrorTerms E_stderr;
  /// a_k^2 / A_k.
  double step_ratio = 0.0;
  /// ||y_k - x_k - (a_k/A_k)(v_k - v_{k-1})||.
  double identity_residual = 0.0;
  std::int64_t oracle_calls_total = 0;
  std::int64_t rounds_total = 0;
  int halvings = 0;
};

enum class RunStatus { Completed, TargetReached, BudgetExhausted };
std::string to_string(RunStatus s);

struct AgdResult {
  std::vector<AgdRecord> records;
  RunStatus status = RunStatus::Completed;
  AgdState final_state;
  bool has_ledger = false;
  double scale = 1.0;
  double initial_distance_sq = 0.0;
  std::int64_t oracle_calls = 0;
  std::int64_t rounds = 0;
  std::int64_t queries_outside_unit_ball = 0;
  /// Calls spent on reporting f(y_k) and on ledger diagnostics; not part of
  /// the algorithm's query count.
  std::int64_t reporting_calls = 0;
  std::int64_t diagnostic_calls = 0;
};

/// Runs AGD+ with the selected schedule and gradient mode.
///
/// Exact mode uses g_k = gamma(x_k): one call per round (two per trial when
/// backtracking, which also needs f(y_k)). The ledger is exact and E_b = E_v = 0.
///
/// Smoothed mode uses the minibatch mean of gamma(x_k + r u_i): m calls in one
/// round. The ledger is kept against f_r using diagnostic ball samples shared
/// across f_r(y_k) - f_r(x_k) and grad f_r(x_k), so E_s carries a standard error.
AgdResult run_agd(const Oracle& o, const AgdOptions& opt);

/// Same, with w and f_star defaulting to the function's metadata.
AgdResult run_agd(const BenchFunction& fn, AgdOptions opt);

}  // namespace bvg
