#pragma once

#include "bvg/oracle.hpp"
#include "bvg/rng.hpp"
#include "bvg/vec.hpp"

#include <cstdint>

namespace bvg {

struct SmoothingConfig {
  double r = 1.0;
  std::int64_t samples = 1000;
  RngStream rng{0};
  /// Worker threads for sample evaluation; 0 means hardware concurrency.
  /// Results do not depend on this value.
  unsigned threads = 1;
};

struct ScalarEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

struct VecEstimate {
  Vec value;
  /// Componentwise standard errors.
  Vec std_error;
  /// sqrt(trace of the covariance of the mean).
  double std_error_norm = 0.0;
  std::int64_t samples = 0;
};

// All estimators draw sample i of block b from cfg.rng.split(b), so the result
// depends only on (oracle, x, cfg) and not on cfg.threads. Oracle calls made
// equal cfg.samples exactly.

/// Monte Carlo f_r(x) from antithetic pairs (f(x+ru) + f(x-ru))/2, u uniform in
/// the unit ball. samples counts oracle evaluations and must be even.
/// For convex f every pair average is >= f(x), so the estimate is too.
ScalarEstimate smoothed_value(const Oracle& o, const Vec& x, const SmoothingConfig& cfg);

/// Mean of subgradients at x + r u, u uniform in the unit ball.
VecEstimate ball_gradient_estimate(const Oracle& o, const Vec& x, const SmoothingConfig& cfg);

/// Sphere estimator (d/r) f(x+ru) u evaluated on antithetic pairs, i.e.
/// (d/2r)(f(x+ru) - f(x-ru)) u per pair. Value queries only; samples must be even.
VecEstimate stokes_gradient_estimate(const Oracle& o, const Vec& x, const SmoothingConfig& cfg);

struct Minibatch {
  Vec gradient;
  /// Oracle queries issued for this batch (one round).
  std::int64_t queries = 0;
};

/// Average of m ball-gradient samples; equals ball_gradient_estimate with
/// samples = m and the same stream.
Minibatch minibatch_gradient(const Oracle& o, const Vec& x, double r, std::int64_t m, const RngStream& rng,
                             unsigned threads = 1);

/// E||gamma(x+ru) - grad f_r(x)||^2 by two passes: cfg.samples ball draws on
/// stream split(0) estimate grad f_r, then cfg.samples fresh draws on split(1)
/// average the squared deviation. Uses 2 * cfg.samples oracle calls.
ScalarEstimate gradient_variance(const Oracle& o, const Vec& x, const SmoothingConfig& cfg);

}  // namespace bvg
