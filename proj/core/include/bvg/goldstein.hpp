#pragma once

#include "bvg/oracle.hpp"
#include "bvg/rng.hpp"
#include "bvg/testbed.hpp"
#include "bvg/vec.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bvg {

struct IngdConfig {
  double delta = 0.1;
  double eps = 0.1;
  /// Local Lipschitz estimate; sets the perturbation radius 2^-p.
  double M = 1.0;
  /// BVG_max constant at radius 2 delta.
  double lhat = 1.0;
  std::int64_t max_outer = 1000;
  /// Cap on the length of one innermost loop.
  std::int64_t max_inner = 100000;
  /// Cap on all oracle queries; 0 means none.
  std::int64_t max_queries = 0;
  double failure_beta = 0.1;
  RngStream rng{0};
  /// Grow p by one every `patience` rejected candidates within an inner loop.
  bool adaptive_p = false;
  std::int64_t patience = 1000;
};

/// max(1, ceil(log2(12 M / eps))).
int perturbation_exponent(double M, double eps);

struct DescentCheck {
  bool descent = false;
  double f_trial = 0.0;
};

/// f(x - delta g/||g||) - f(x) <= -(delta/2)||g||, with f(x) supplied by the
/// caller. One value query. Throws on g = 0.
DescentCheck descent_test(const Oracle& o, const Vec& x, double f_x, const Vec& g, double delta);
/// Same, evaluating f(x) too (two value queries).
bool descent_test(const Oracle& o, const Vec& x, const Vec& g, double delta);

struct InnerUpdate {
  Vec g_tilde;
  /// Sample point y on the segment [x, x - delta h/||h||].
  Vec y;
  double lambda = 0.0;
};

/// h uniform in the ball of radius 2^-p around g, y uniform on
/// [x, x - delta h/||h||], u = gamma(y), lambda = min(1, ||g||^2 / (3 lhat^2)),
/// g_tilde = g + lambda (u - g). One subgradient query.
InnerUpdate inner_update(const Oracle& o, const Vec& x, const Vec& g, const IngdConfig& cfg, int p, RngStream& rng);

/// ||g~||^2 <= ||g||^2 - ||g||^4 / (18 lhat^2)  or  ||g~||^2 <= 3 ||g||^2 / 4.
bool accept_candidate(const Vec& g, const Vec& g_tilde, double lhat);

struct WitnessPoint {
  Vec point;
  double weight;
};

struct IngdLogRow {
  std::int64_t k = 0;
  double f_x = 0.0;
  double g_norm = 0.0;
  /// Candidate draws made during this outer iteration.
  std::int64_t inner_len = 0;
  bool descent = false;
  std::int64_t oracle_calls_total = 0;
};

struct IngdCertificate {
  bool success = false;
  /// "stationary", "outer-cap", "inner-cap", or "query-budget".
  std::string status;
  Vec x_out;
  Vec g_out;
  std::vector<WitnessPoint> witness;
  std::int64_t descent_steps = 0;
  /// Length of every innermost loop (number of candidates drawn before one
  /// was accepted).
  std::vector<std::int64_t> inner_loop_lengths;
  std::int64_t total_oracle_calls = 0;
  int final_p = 0;
  std::vector<IngdLogRow> log;
};

/// Algorithm loop. Every returned certificate carries a witness for g_out;
/// success means ||g_out|| <= eps.
IngdCertificate run_ingd(const Oracle& o, const Vec& x0, const IngdConfig& cfg);

struct CertificateCheck {
  bool valid = false;
  double recombination_error = 0.0;
  double max_distance = 0.0;
  double weight_sum = 0.0;
  double g_norm = 0.0;
};

/// Re-evaluates the oracle at every witness point and checks weights
/// (nonnegative, sum 1 within 1e-9), distances (<= delta (1 + 1e-12)),
/// recombination (within 1e-9 * max(1, max ||gamma||)) and ||g_out|| <= eps.
CertificateCheck validate_certificate(const Oracle& o, const IngdCertificate& cert, double delta, double eps);

/// ceil(2 Delta / (eps delta)).
std::int64_t ingd_descent_cap(double Delta, double eps, double delta);
/// ceil(15 lhat^2 / eps^2 * ln(K / beta)).
std::int64_t ingd_inner_cap(double lhat, double eps, std::int64_t K, double beta);
/// (K + 1) * J: the explicit query count behind the convergence theorem.
double ingd_query_bound(double Delta, double lhat, double eps, double delta, double beta);

}  // namespace bvg
