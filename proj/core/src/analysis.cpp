#include "bvg/analysis.hpp"

#include "bvg/sampling.hpp"
#include "bvg/smoothing.hpp"
#include "detail/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bvg {

using detail::block_reduce;
using detail::MaxAccumulator;
using detail::ScalarMoments;
using detail::VecMoments;

BvgReport estimate_bvg_max(const Oracle& o, const Vec& region_center, double region_radius, double r,
                           std::int64_t n_pairs, const RngStream& rng, unsigned threads) {
  require_dim(region_center, o.dim(), "estimate_bvg_max");
  if (!(r > 0.0)) throw std::invalid_argument("estimate_bvg_max: r must be positive");
  if (n_pairs < 1) throw std::invalid_argument("estimate_bvg_max: n_pairs must be >= 1");
  if (!(region_radius >= 0.0)) throw std::invalid_argument("estimate_bvg_max: region_radius must be >= 0");
  const Eigen::Index d = o.dim();
  const auto acc = block_reduce(n_pairs, rng, threads, MaxAccumulator{}, [&](RngStream& s) {
    const Vec x = region_center + region_radius * sample_unit_ball(d, s);
    const Vec u = sample_unit_ball(d, s);
    return (o.subgradient(x + r * u) - o.subgradient(x)).norm();
  });
  BvgReport rep;
  rep.r = r;
  rep.lhat_estimate = acc.max;
  rep.pairs_sampled = n_pairs;
  return rep;
}

BvgReport estimate_bvg_avg(const Oracle& o, const std::vector<Vec>& points, double r, int rho_grid_size,
                           std::int64_t n_per_rho, const RngStream& rng, unsigned threads) {
  if (points.empty()) throw std::invalid_argument("estimate_bvg_avg: no points");
  if (!(r > 0.0)) throw std::invalid_argument("estimate_bvg_avg: r must be positive");
  if (rho_grid_size < 1) throw std::invalid_argument("estimate_bvg_avg: rho_grid_size must be >= 1");
  if (n_per_rho < 2) throw std::invalid_argument("estimate_bvg_avg: n_per_rho must be >= 2");
  const Eigen::Index d = o.dim();

  BvgReport rep;
  rep.r = r;
  for (int j = 0; j < rho_grid_size; ++j) rep.rho_grid.push_back(std::ldexp(r, -j));

  bool first = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec& x = points[i];
    require_dim(x, d, "estimate_bvg_avg");
    const RngStream point_rng = rng.split(i);
    SmoothingConfig center_cfg{r, 10 * n_per_rho, point_rng.split(0), threads};
    const Vec grad_fr = ball_gradient_estimate(o, x, center_cfg).value;
    for (std::size_t j = 0; j < rep.rho_grid.size(); ++j) {
      const double rho = rep.rho_grid[j];
      const auto m = block_reduce(n_per_rho, point_rng.split(1 + j), threads, ScalarMoments{}, [&](RngStream& s) {
        return (o.subgradient(x + rho * sample_unit_sphere(d, s)) - grad_fr).norm();
      });
      if (first || m.mean > rep.lavg_estimate) {
        rep.lavg_estimate = m.mean;
        rep.lavg_stderr = m.std_error();
        first = false;
      }
      rep.pairs_sampled += n_per_rho;
    }
  }
  return rep;
}

WidthReport mean_width_mc(const std::vector<Vec>& points, std::int64_t n, const RngStream& rng) {
  if (points.empty()) throw std::invalid_argument("mean_width_mc: empty point cloud");
  if (n < 1) throw std::invalid_argument("mean_width_mc: n must be >= 1");
  const Eigen::Index d = points.front().size();
  Mat P(static_cast<Eigen::Index>(points.size()), d);
  for (std::size_t i = 0; i < points.size(); ++i) {
    require_dim(points[i], d, "mean_width_mc");
    P.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  }
  WidthReport rep;
  rep.set_descriptor = "point-cloud(" + std::to_string(points.size()) + ")";
  if (points.size() == 1) return rep;

  const auto m = block_reduce(n, rng, 1, ScalarMoments{}, [&](RngStream& s) {
    const Vec proj = P * sample_unit_sphere(d, s);
    return proj.maxCoeff() - proj.minCoeff();
  });
  rep.width = m.mean;
  rep.std_error = n > 1 ? m.std_error() : std::numeric_limits<double>::infinity();
  return rep;
}

WidthReport mean_width_named(const std::string& body, Eigen::Index d) {
  if (d < 1) throw std::invalid_argument("mean_width_named: d must be >= 1");
  WidthReport rep;
  rep.set_descriptor = body;
  if (body == "unit-ball") {
    rep.width = 1.0;
  } else if (body == "origin") {
    rep.width = 0.0;
  } else {
    throw std::invalid_argument("mean_width_named: unknown body '" + body + "'");
  }
  return rep;
}

std::vector<Vec> sample_goldstein_cloud(const Oracle& o, const Vec& x, double r, std::int64_t n,
                                        const RngStream& rng) {
  require_dim(x, o.dim(), "sample_goldstein_cloud");
  if (n < 1) throw std::invalid_argument("sample_goldstein_cloud: n must be >= 1");
  std::vector<Vec> cloud;
  cloud.reserve(static_cast<std::size_t>(n));
  RngStream s = rng;
  for (std::int64_t i = 0; i < n; ++i) cloud.push_back(o.subgradient(x + r * sample_unit_ball(x.size(), s)));
  return cloud;
}

RadiusChoice choose_radius(RadiusRule rule, double eps, const std::vector<RadiusEntry>& table, double d,
                           double factor) {
  if (table.empty()) throw std::invalid_argument("choose_radius: empty table");
  if (!(eps > 0.0)) throw std::invalid_argument("choose_radius: eps must be positive");
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& e : table) {
    if (!(e.r > 0.0) || !(e.constant >= 0.0)) throw std::invalid_argument("choose_radius: bad table entry");
    smallest = std::min(smallest, e.r);
  }

  RadiusChoice out;
  if (rule == RadiusRule::Avg) {
    double best = -1.0;
    for (const auto& e : table) {
      if (e.r * e.constant <= eps / 2.0) best = std::max(best, e.r);
    }
    if (best < 0.0) return {smallest, true};
    out.r = best;
    return out;
  }

  if (!(d > 1.0)) throw std::invalid_argument("choose_radius: width rule needs d > 1");
  if (!(factor > 0.0)) throw std::invalid_argument("choose_radius: factor must be positive");
  const double budget = factor * eps * std::sqrt(d / std::log(d));
  for (const auto& e : table) {
    const double cand = e.constant > 0.0 ? std::min(e.r, budget / e.constant) : e.r;
    out.r = std::max(out.r, cand);
  }
  return out;
}

namespace {

double rel_tol(double fx, double fy) { return 1e-9 * std::max({1.0, std::abs(fx), std::abs(fy)}); }

void record(CheckResult& res, double margin, double tol) {
  ++res.checked;
  if (res.checked == 1 || margin < res.worst_margin) res.worst_margin = margin;
  if (margin < -tol) ++res.violations;
}

}  // namespace

CheckResult check_upper_quadratic(const Oracle& o, const std::vector<PointPair>& pairs, double r, double lhat,
                                  BoundForm form) {
  if (!(r > 0.0) || !(lhat >= 0.0)) throw std::invalid_argument("check_upper_quadratic: bad r or lhat");
  CheckResult res;
  res.lemma_id = form == BoundForm::Stated ? "upper-quadratic" : "upper-quadratic-corrected";
  for (const auto& [x, y] : pairs) {
    const OracleResult ox = o.eval(x);
    const double fy = o.value(y);
    const double lhs = fy - ox.value - ox.subgradient.dot(y - x);
    const double dist = (y - x).norm();
    double rhs;
    if (dist <= r) {
      rhs = lhat * dist;
    } else if (form == BoundForm::Stated) {
      rhs = lhat / (2.0 * r) * dist * dist;
    } else {
      rhs = lhat * dist * (std::floor(dist / r) + 2.0) / 2.0;
    }
    ++res.trials;
    record(res, rhs - lhs, rel_tol(ox.value, fy));
  }
  return res;
}

CheckResult check_interpolation(const Oracle& o, const std::vector<PointPair>& pairs, double r, double lhat,
                                BoundForm form) {
  if (!(r > 0.0) || !(lhat >= 0.0)) throw std::invalid_argument("check_interpolation: bad r or lhat");
  CheckResult res;
  res.lemma_id = form == BoundForm::Stated ? "interpolation" : "interpolation-corrected";
  for (const auto& [x, y] : pairs) {
    ++res.trials;
    const OracleResult ox = o.eval(x);
    const OracleResult oy = o.eval(y);
    const double gap = (oy.subgradient - ox.subgradient).norm();
    if (!(gap > lhat)) continue;
    const double rhs = oy.value - ox.value - ox.subgradient.dot(y - x);
    double lhs;
    if (lhat == 0.0) {
      lhs = std::numeric_limits<double>::infinity();
    } else if (form == BoundForm::Stated) {
      lhs = r / (2.0 * lhat) * gap * gap;
    } else {
      lhs = r / (2.0 * lhat) * (gap - lhat) * (gap - lhat);
    }
    record(res, rhs - lhs, rel_tol(ox.value, oy.value));
  }
  return res;
}

double smoothness_constant(double r, double L_r, double lhat, double d) {
  const double via_avg = L_r * d / r;
  const double via_max = std::sqrt(std::numbers::pi / 2.0) * lhat * std::sqrt(d) / r;
  return std::min(via_avg, via_max);
}

CheckResult check_smoothness_fr(const Oracle& o, const std::vector<PointPair>& pairs, double r, double L_r,
                                double lhat, const SmoothnessCheckConfig& cfg) {
  if (!(r > 0.0)) throw std::invalid_argument("check_smoothness_fr: r must be positive");
  if (cfg.samples < 2) throw std::invalid_argument("check_smoothness_fr: samples must be >= 2");
  const Eigen::Index d = o.dim();
  const double lambda = smoothness_constant(r, L_r, lhat, static_cast<double>(d));
  CheckResult res;
  res.lemma_id = "smoothness-fr";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    require_dim(x, d, "check_smoothness_fr");
    require_dim(y, d, "check_smoothness_fr");
    // Same u for both points, so shared noise cancels in the difference.
    const auto m = block_reduce(cfg.samples, cfg.rng.split(i), cfg.threads, VecMoments(d), [&](RngStream& s) {
      const Vec u = r * sample_unit_ball(d, s);
      return Vec(o.subgradient(x + u) - o.subgradient(y + u));
    });
    const double se = std::sqrt(m.m2.sum() / static_cast<double>(m.n - 1) / static_cast<double>(m.n));
    const double lhs = m.mean.norm();
    const double rhs = lambda * (x - y).norm() + cfg.slack_stderrs * se;
    ++res.trials;
    record(res, rhs - lhs, 1e-12);
  }
  return res;
}

std::vector<PointPair> random_pairs_in_box(Eigen::Index d, double lo, double hi, std::int64_t n, RngStream& rng) {
  if (d < 1 || !(hi > lo) || n < 0) throw std::invalid_argument("random_pairs_in_box: bad arguments");
  std::vector<PointPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  auto draw = [&] {
    Vec v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = lo + (hi - lo) * rng.uniform();
    return v;
  };
  for (std::int64_t i = 0; i < n; ++i) {
    Vec x = draw();
    Vec y = draw();
    pairs.emplace_back(std::move(x), std::move(y));
  }
  return pairs;
}

namespace {

std::ostringstream kv_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

}  // namespace

std::string to_key_value(const BvgReport& rep) {
  auto os = kv_stream();
  os << "r=" << rep.r << "\n"
     << "lhat_estimate=" << rep.lhat_estimate << "\n"
     << "lavg_estimate=" << rep.lavg_estimate << "\n"
     << "lavg_stderr=" << rep.lavg_stderr << "\n"
     << "pairs_sampled=" << rep.pairs_sampled << "\n"
     << "rho_grid=";
  for (std::size_t i = 0; i < rep.rho_grid.size(); ++i) os << (i ? "," : "") << rep.rho_grid[i];
  os << "\n";
  return os.str();
}

std::string to_key_value(const WidthReport& rep) {
  auto os = kv_stream();
  os << "width=" << rep.width << "\n"
     << "stderr=" << rep.std_error << "\n"
     << "set=" << rep.set_descriptor << "\n";
  return os.str();
}

std::string to_key_value(const CheckResult& rep) {
  auto os = kv_stream();
  os << "lemma_id=" << rep.lemma_id << "\n"
     << "violations=" << rep.violations << "\n"
     << "worst_margin=" << rep.worst_margin << "\n"
     << "trials=" << rep.trials << "\n"
     << "checked=" << rep.checked << "\n";
  return os.str();
}

}  // namespace bvg
