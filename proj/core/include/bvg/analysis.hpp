#pragma once

#include "bvg/oracle.hpp"
#include "bvg/rng.hpp"
#include "bvg/vec.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bvg {

struct BvgReport {
  double r = 0.0;
  /// Max over sampled pairs of ||gamma(x+ru) - gamma(x)||: a lower bound on L-hat_r.
  double lhat_estimate = 0.0;
  /// Max over points and the rho grid of the sphere-averaged deviation from
  /// grad f_r: an estimate of L_r.
  double lavg_estimate = 0.0;
  double lavg_stderr = 0.0;
  std::int64_t pairs_sampled = 0;
  std::vector<double> rho_grid;
};

/// Samples x uniformly in the ball (center, region_radius) and u uniformly in
/// the unit ball; pair i is drawn from rng.split(i / 256) so that a larger
/// n_pairs extends, never replaces, a smaller run.
BvgReport estimate_bvg_max(const Oracle& o, const Vec& region_center, double region_radius, double r,
                           std::int64_t n_pairs, const RngStream& rng, unsigned threads = 1);

/// rho grid r, r/2, ..., r/2^(grid_size-1). grad f_r at each point is a ball
/// estimate with 10 * n_per_rho samples.
BvgReport estimate_bvg_avg(const Oracle& o, const std::vector<Vec>& points, double r, int rho_grid_size,
                           std::int64_t n_per_rho, const RngStream& rng, unsigned threads = 1);

struct WidthReport {
  double width = 0.0;
  double std_error = 0.0;
  std::string set_descriptor;
};

/// E over u on the unit sphere of max_p <u,p> - min_p <u,p>.
WidthReport mean_width_mc(const std::vector<Vec>& points, std::int64_t n, const RngStream& rng);

/// Mean width of a named body in R^d. Known names: "unit-ball" (width 1, the
/// tabulated reference value) and "origin" (width 0).
WidthReport mean_width_named(const std::string& body, Eigen::Index d);

/// Subgradients at x + r u_i, u_i uniform in the unit ball.
std::vector<Vec> sample_goldstein_cloud(const Oracle& o, const Vec& x, double r, std::int64_t n,
                                        const RngStream& rng);

enum class RadiusRule { Avg, Width };

struct RadiusEntry {
  double r;
  double constant;
};

struct RadiusChoice {
  double r = 0.0;
  /// True when no radius met the rule and the smallest tabulated r was used.
  bool fallback = false;
};

/// Avg rule: largest tabulated r with r * L_r <= eps / 2.
/// Width rule: largest r with r * L-hat_r <= factor * eps * sqrt(d / ln d),
/// using that L-hat is nondecreasing in r, so the value tabulated at r_j bounds
/// L-hat on (0, r_j]. `d` is only used by the width rule and must exceed 1.
RadiusChoice choose_radius(RadiusRule rule, double eps, const std::vector<RadiusEntry>& table, double d = 0.0,
                           double factor = 1.0);

struct CheckResult {
  std::string lemma_id;
  std::int64_t violations = 0;
  /// Smallest rhs - lhs seen over checked pairs (negative means violated).
  double worst_margin = 0.0;
  std::int64_t trials = 0;
  std::int64_t checked = 0;
};

using PointPair = std::pair<Vec, Vec>;

enum class BoundForm {
  /// Inequalities exactly as stated in the lemmas.
  Stated,
  /// Bounds re-derived with the segment-chaining sum evaluated exactly:
  /// L-hat D (floor(D/r) + 2) / 2 for D = ||y-x|| > r, and the interpolation
  /// inequality that follows from it, (r / 2 L-hat)(||dg|| - L-hat)^2.
  Corrected,
};

/// f(y) - f(x) - <gamma(x), y - x> <= L-hat D (D <= r), (L-hat / 2r) D^2 (D > r).
/// Tolerance 1e-9 * max(1, |f(x)|, |f(y)|).
CheckResult check_upper_quadratic(const Oracle& o, const std::vector<PointPair>& pairs, double r, double lhat,
                                  BoundForm form = BoundForm::Stated);

/// When ||gamma(y) - gamma(x)|| > L-hat: (r / 2 L-hat)||gamma(y) - gamma(x)||^2
/// <= f(y) - f(x) - <gamma(x), y - x>. Pairs failing the trigger are skipped.
CheckResult check_interpolation(const Oracle& o, const std::vector<PointPair>& pairs, double r, double lhat,
                                BoundForm form = BoundForm::Stated);

struct SmoothnessCheckConfig {
  std::int64_t samples = 20000;
  RngStream rng{0};
  unsigned threads = 1;
  double slack_stderrs = 4.0;
};

/// ||grad f_r(x) - grad f_r(y)|| <= min(L_r d / r, sqrt(pi/2) L-hat sqrt(d) / r) ||x - y||,
/// with both gradients from ball estimates sharing random numbers; the right
/// side gets slack_stderrs standard errors of the difference.
CheckResult check_smoothness_fr(const Oracle& o, const std::vector<PointPair>& pairs, double r, double L_r,
                                double lhat, const SmoothnessCheckConfig& cfg);

/// Lipschitz constant of grad f_r from the smoothness lemma.
double smoothness_constant(double r, double L_r, double lhat, double d);

/// Uniform random pairs in the axis box [lo, hi]^d.
std::vector<PointPair> random_pairs_in_box(Eigen::Index d, double lo, double hi, std::int64_t n, RngStream& rng);

/// Line-oriented key=value serialization.
std::string to_key_value(const BvgReport& rep);
std::string to_key_value(const WidthReport& rep);
std::string to_key_value(const CheckResult& rep);

}  // namespace bvg
