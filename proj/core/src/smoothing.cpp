#include "bvg/smoothing.hpp"

#include "bvg/sampling.hpp"
#include "detail/monte_carlo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bvg {

namespace {

using detail::block_reduce;
using detail::ScalarMoments;
using detail::VecMoments;

void check_inputs(const Oracle& o, const Vec& x, double r, std::int64_t samples, const char* where) {
  require_dim(x, o.dim(), where);
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument(std::string(where) + ": r must be positive");
  if (samples < 1) throw std::invalid_argument(std::string(where) + ": samples must be >= 1");
}

void require_even(std::int64_t samples, const char* where) {
  if (samples % 2 != 0) {
    throw std::invalid_argument(std::string(where) + ": samples must be even (antithetic pairs)");
  }
}

VecEstimate to_vec_estimate(const VecMoments& m, std::int64_t samples) {
  VecEstimate e;
  e.value = m.mean;
  e.samples = samples;
  if (m.n < 2) {
    e.std_error = Vec::Constant(m.mean.size(), std::numeric_limits<double>::infinity());
    e.std_error_norm = std::numeric_limits<double>::infinity();
    return e;
  }
  const double scale = 1.0 / (static_cast<double>(m.n - 1) * static_cast<double>(m.n));
  e.std_error = (m.m2 * scale).cwiseSqrt();
  e.std_error_norm = std::sqrt(m.m2.sum() * scale);
  return e;
}

}  // namespace

ScalarEstimate smoothed_value(const Oracle& o, const Vec& x, const SmoothingConfig& cfg) {
  check_inputs(o, x, cfg.r, cfg.samples, "smoothed_value");
  require_even(cfg.samples, "smoothed_value");
  const Eigen::Index d = x.size();
  const auto m = block_reduce(cfg.samples / 2, cfg.rng, cfg.threads, ScalarMoments{}, [&](RngStream& s) {
    const Vec u = sample_unit_ball(d, s) * cfg.r;
    return 0.5 * (o.value(x + u) + o.value(x - u));
  });
  return {m.mean, m.std_error(), cfg.samples};
}

VecEstimate ball_gradient_estimate(const Oracle& o, const Vec& x, const SmoothingConfig& cfg) {
  check_inputs(o, x, cfg.r, cfg.samples, "ball_gradient_estimate");
  const Eigen::Index d = x.size();
  const auto m = block_reduce(cfg.samples, cfg.rng, cfg.threads, VecMoments(d), [&](RngStream& s) {
    return o.subgradient(x + cfg.r * sample_unit_ball(d, s));
  });
  return to_vec_estimate(m, cfg.samples);
}

VecEstimate stokes_gradient_estimate(const Oracle& o, const Vec& x, const SmoothingConfig& cfg) {
  check_inputs(o, x, cfg.r, cfg.samples, "stokes_gradient_estimate");
  require_even(cfg.samples, "stokes_gradient_estimate");
  const Eigen::Index d = x.size();
  const double scale = static_cast<double>(d) / (2.0 * cfg.r);
  const auto m = block_reduce(cfg.samples / 2, cfg.rng, cfg.threads, VecMoments(d), [&](RngStream& s) {
    const Vec u = sample_unit_sphere(d, s);
    const double diff = o.value(x + cfg.r * u) - o.value(x - cfg.r * u);
    return Vec(u * (scale * diff));
  });
  return to_vec_estimate(m, cfg.samples);
}

Minibatch minibatch_gradient(const Oracle& o, const Vec& x, double r, std::int64_t m, const RngStream& rng,
                             unsigned threads) {
  SmoothingConfig cfg{r, m, rng, threads};
  VecEstimate e = ball_gradient_estimate(o, x, cfg);
  return {std::move(e.value), m};
}

ScalarEstimate gradient_variance(const Oracle& o, const Vec& x, const SmoothingConfig& cfg) {
  check_inputs(o, x, cfg.r, cfg.samples, "gradient_variance");
  SmoothingConfig first = cfg;
  first.rng = cfg.rng.split(0);
  const Vec center = ball_gradient_estimate(o, x, first).value;
  const Eigen::Index d = x.size();
  const auto m = block_reduce(cfg.samples, cfg.rng.split(1), cfg.threads, ScalarMoments{}, [&](RngStream& s) {
    return (o.subgradient(x + cfg.r * sample_unit_ball(d, s)) - center).squaredNorm();
  });
  return {m.mean, m.std_error(), 2 * cfg.samples};
}

}  // namespace bvg
