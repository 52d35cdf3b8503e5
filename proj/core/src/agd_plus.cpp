#include "bvg/agd_plus.hpp"

#include "bvg/sampling.hpp"
#include "bvg/smoothing.hpp"
#include "detail/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bvg {

AgdState agd_init(const Vec& x0, const FeasibleSet& set) {
  if (!all_finite(x0)) throw std::invalid_argument("agd_init: x0 must be finite");
  AgdState s;
  s.x0 = x0;
  s.x = x0;
  s.y = x0;
  s.z = x0;
  s.v = set.project(x0);
  s.v_prev = s.v;
  return s;
}

Vec agd_query_point(const AgdState& s, double a) {
  const double A = s.A + a;
  return (s.A / A) * s.y + (a / A) * s.v;
}

AgdState agd_step(const AgdState& s, const Vec& g, double a, const FeasibleSet& set) {
  require_same_dim(g, s.z, "agd_step");
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("agd_step: step size must be positive");
  AgdState n;
  n.k = s.k + 1;
  n.x0 = s.x0;
  n.a = a;
  n.A = s.A + a;
  n.x = (s.A / n.A) * s.y + (a / n.A) * s.v;
  n.z = s.z - a * g;
  n.v_prev = s.v;
  n.v = set.project(n.z);
  n.y = (s.A / n.A) * s.y + (a / n.A) * n.v;
  return n;
}

double det_step_size(double A_prev, double eps, double lhat, double r) {
  if (!(eps > 0.0) || !(lhat > 0.0) || !(r > 0.0) || !(A_prev >= 0.0)) {
    throw std::invalid_argument("det_step_size: eps, lhat, r must be positive and A_prev >= 0");
  }
  const double by_eps = eps / (lhat * lhat);
  const double by_radius = (r / lhat) * (1.0 + std::sqrt(1.0 + 4.0 * A_prev * lhat / r)) / 2.0;
  return std::min(by_eps, by_radius);
}

double stochastic_step_size(std::int64_t k, double A_prev, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("stochastic_step_size: beta must be positive");
  if (k < 0 || !(A_prev >= 0.0)) throw std::invalid_argument("stochastic_step_size: bad k or A_prev");
  if (k == 0) return beta;
  return (beta + std::sqrt(beta * beta + 4.0 * beta * A_prev)) / 2.0;
}

double weak_smooth_radius(double M, double kappa, double D, double eps) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("weak_smooth_radius: kappa must lie in (0, 1]");
  if (!(M > 0.0) || !(D > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("weak_smooth_radius: M, D, eps must be positive");
  }
  return std::pow(eps * eps * eps / (M * M * M * D * D), 1.0 / (1.0 + 3.0 * kappa));
}

double deterministic_iteration_bound(double lhat, double r, double D, double eps) {
  if (!(lhat >= 0.0) || !(r > 0.0) || !(D >= 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("deterministic_iteration_bound: bad arguments");
  }
  return lhat * lhat * D * D / (eps * eps) + std::sqrt(lhat / (r * eps)) * D;
}

double smoothed_beta(double lambda, double D, double L_r, double lhat, std::int64_t K) {
  if (!(lambda > 0.0) || !(D > 0.0) || !(L_r > 0.0) || !(lhat > 0.0) || K < 1) {
    throw std::invalid_argument("smoothed_beta: arguments must be positive");
  }
  const double by_noise = D / (std::sqrt(L_r * lhat) * std::pow(static_cast<double>(K), 1.5));
  return std::min(1.0 / lambda, by_noise);
}

ErrorTerms error_terms(const AgdState& s, double f_x, const Vec& gamma_x, double f_y, const Vec& g, const Vec& w) {
  const Vec dy = s.y - s.x;
  ErrorTerms e;
  e.E_s = s.A * (f_y - f_x - gamma_x.dot(dy) - s.A / (2.0 * s.a * s.a) * dy.squaredNorm());
  e.E_b = s.a * (g - gamma_x).dot(w - s.x);
  e.E_v = s.a * (gamma_x - g).dot(s.v - s.x);
  return e;
}

BacktrackResult backtrack_step(const Oracle& o, const AgdState& s, double a_proposed, double eps,
                               const FeasibleSet& set) {
  if (!(a_proposed > 0.0)) throw std::invalid_argument("backtrack_step: proposal must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("backtrack_step: eps must be positive");
  BacktrackResult res;
  double a = a_proposed;
  for (int h = 0;; ++h) {
    if (a < 1e-300) throw std::runtime_error("backtrack_step: step size underflow");
    OracleResult at_x = o.eval(agd_query_point(s, a));
    AgdState next = agd_step(s, at_x.subgradient, a, set);
    const double f_y = o.value(next.y);
    const Vec dy = next.y - next.x;
    const double E_s =
        next.A * (f_y - at_x.value - at_x.subgradient.dot(dy) - next.A / (2.0 * a * a) * dy.squaredNorm());
    if (E_s <= a * eps / 2.0) {
      res.a = a;
      res.halvings = h;
      res.state = std::move(next);
      res.at_x = std::move(at_x);
      res.f_y = f_y;
      res.E_s = E_s;
      return res;
    }
    a /= 2.0;
  }
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed:
      return "completed";
    case RunStatus::TargetReached:
      return "target-reached";
    case RunStatus::BudgetExhausted:
      return "budget-exhausted";
  }
  return "unknown";
}

namespace {

void validate(const Oracle& o, const AgdOptions& opt) {
  require_dim(opt.x0, o.dim(), "run_agd");
  if (!opt.set.contains(opt.x0, 1e-9)) throw std::invalid_argument("run_agd: x0 must lie in the feasible set");
  if (opt.iters < 1) throw std::invalid_argument("run_agd: iters must be >= 1");
  if (opt.w) require_dim(*opt.w, o.dim(), "run_agd");
  const auto& sc = opt.schedule;
  switch (sc.mode) {
    case ScheduleMode::DeterministicBvg:
      if (!(sc.eps > 0.0) || !(sc.lhat > 0.0) || !(sc.r > 0.0)) {
        throw std::invalid_argument("run_agd: deterministic schedule needs eps, lhat, r > 0");
      }
      break;
    case ScheduleMode::Backtracking:
      if (!(sc.eps > 0.0) || !(sc.initial_step > 0.0)) {
        throw std::invalid_argument("run_agd: backtracking needs eps > 0 and initial_step > 0");
      }
      if (opt.grad_mode != GradMode::Exact) {
        throw std::invalid_argument("run_agd: backtracking requires the exact gradient mode");
      }
      break;
    case ScheduleMode::StochasticBeta:
      if (!sc.beta || !(*sc.beta > 0.0)) throw std::invalid_argument("run_agd: stochastic schedule needs beta > 0");
      break;
  }
  if (opt.grad_mode == GradMode::Smoothed) {
    if (!(opt.smoothing_r > 0.0)) throw std::invalid_argument("run_agd: smoothing_r must be positive");
    if (opt.minibatch < 1) throw std::invalid_argument("run_agd: minibatch must be >= 1");
    if (opt.diagnostic_samples == 1 || opt.diagnostic_samples < 0) {
      throw std::invalid_argument("run_agd: diagnostic_samples must be 0 or >= 2");
    }
  }
}

struct SmoothedLedger {
  ErrorTerms E;
  ErrorTerms se;
  double fr_x = 0.0;
  double fr_y = 0.0;
};

// Ledger against f_r with shared ball samples u_i:
//   f_r(y) - f_r(x) - <grad f_r(x), y - x>  ~  mean f(y+ru) - f(x+ru) - <gamma(x+ru), y - x>
SmoothedLedger smoothed_ledger(const Oracle& o, const AgdState& s, const Vec& g, const Vec& w, double r,
                               std::int64_t n, const RngStream& rng, unsigned threads) {
  const Eigen::Index d = s.x.size();
  const Vec dy = s.y - s.x;
  const Vec dw = w - s.x;
  const Vec dv = s.v - s.x;
  const auto m = detail::block_reduce(n, rng, threads, detail::VecMoments(5), [&](RngStream& st) {
    const Vec u = r * sample_unit_ball(d, st);
    const OracleResult at_x = o.eval(s.x + u);
    const double fy = o.value(s.y + u);
    Vec out(5);
    out << fy - at_x.value - at_x.subgradient.dot(dy), at_x.value, fy, at_x.subgradient.dot(dw),
        at_x.subgradient.dot(dv);
    return out;
  });
  const Vec se = (m.m2 / static_cast<double>(m.n - 1) / static_cast<double>(m.n)).cwiseSqrt();
  SmoothedLedger out;
  out.E.E_s = s.A * (m.mean[0] - s.A / (2.0 * s.a * s.a) * dy.squaredNorm());
  out.E.E_b = s.a * (g.dot(dw) - m.mean[3]);
  out.E.E_v = s.a * (m.mean[4] - g.dot(dv));
  out.se.E_s = s.A * se[0];
  out.se.E_b = s.a * se[3];
  out.se.E_v = s.a * se[4];
  out.fr_x = m.mean[1];
  out.fr_y = m.mean[2];
  return out;
}

}  // namespace

AgdResult run_agd(const Oracle& o, const AgdOptions& opt) {
  validate(o, opt);
  const auto& sc = opt.schedule;
  CountingOracle counted(o);
  AgdResult res;

  const bool smoothed = opt.grad_mode == GradMode::Smoothed;
  res.has_ledger = opt.w.has_value() && (!smoothed || opt.diagnostic_samples > 0);
  const Vec w = opt.w.value_or(opt.x0);
  const double f_x0 = o.value(opt.x0);
  ++res.reporting_calls;
  res.initial_distance_sq = (w - opt.x0).squaredNorm();
  res.scale = std::max({1.0, std::abs(f_x0), res.initial_distance_sq});

  const RngStream alg_rng = opt.rng.split(0);
  const RngStream diag_rng = opt.rng.split(1);

  AgdState s = agd_init(opt.x0, opt.set);
  double sum_af = 0.0;   // sum a_i f(x_i)
  double sum_agx = 0.0;  // sum a_i <g_i, x_i>
  double sum_Eb = 0.0;
  double sum_E = 0.0;
  double prev_ratio = 0.0;
  const double half_w_dist = 0.5 * res.initial_distance_sq;
  const auto nan = std::numeric_limits<double>::quiet_NaN();

  for (std::int64_t k = 0; k < opt.iters; ++k) {
    const std::int64_t calls_now = static_cast<std::int64_t>(counted.counts().total());
    const std::int64_t per_round = smoothed ? opt.minibatch : 1;
    if (opt.max_oracle_calls > 0 && calls_now + per_round > opt.max_oracle_calls) {
      res.status = RunStatus::BudgetExhausted;
      break;
    }

    AgdRecord rec;
    rec.k = k;
    AgdState next;
    Vec g;
    double f_x = nan, f_y = nan, f_y_ledger = nan;
    Vec gamma_x;

    if (sc.mode == ScheduleMode::Backtracking) {
      double proposal = sc.initial_step;
      if (k > 0) {
        const double q = 2.0 * prev_ratio;
        proposal = (q + std::sqrt(q * q + 4.0 * q * s.A)) / 2.0;
      }
      BacktrackResult br = backtrack_step(counted, s, proposal, sc.eps, opt.set);
      res.rounds += 2 * (br.halvings + 1);
      rec.halvings = br.halvings;
      next = std::move(br.state);
      f_x = br.at_x.value;
      g = br.at_x.subgradient;
      gamma_x = g;
      f_y = br.f_y;
      f_y_ledger = f_y;
    } else {
      const double a = sc.mode == ScheduleMode::DeterministicBvg ? det_step_size(s.A, sc.eps, sc.lhat, sc.r)
                                                                 : stochastic_step_size(k, s.A, *sc.beta);
      const Vec xq = agd_query_point(s, a);
      if (smoothed) {
        g = minibatch_gradient(counted, xq, opt.smoothing_r, opt.minibatch, alg_rng.split(k), opt.threads).gradient;
      } else {
        OracleResult at_x = counted.eval(xq);
        f_x = at_x.value;
        g = std::move(at_x.subgradient);
        gamma_x = g;
      }
      ++res.rounds;
      next = agd_step(s, g, a, opt.set);
      f_y = o.value(next.y);
      ++res.reporting_calls;
      f_y_ledger = f_y;
    }

    rec.a = next.a;
    rec.A = next.A;
    rec.f_y = f_y;
    rec.step_ratio = next.a * next.a / next.A;
    rec.identity_residual = (next.y - next.x - (next.a / next.A) * (next.v - next.v_prev)).norm();

    if (res.has_ledger) {
      if (smoothed) {
        const SmoothedLedger sl = smoothed_ledger(o, next, g, w, opt.smoothing_r, opt.diagnostic_samples,
                                                  diag_rng.split(static_cast<std::uint64_t>(k)), opt.threads);
        res.diagnostic_calls += 2 * opt.diagnostic_samples;
        rec.E = sl.E;
        rec.E_stderr = sl.se;
        f_x = sl.fr_x;
        f_y_ledger = sl.fr_y;
      } else {
        rec.E = error_terms(next, f_x, gamma_x, f_y, g, w);
      }
      sum_af += next.a * f_x;
      sum_agx += next.a * g.dot(next.x);
      sum_Eb += rec.E.E_b;
      sum_E += rec.E.total();
      const Vec sum_ag = next.x0 - next.z;
      rec.AG = next.A * f_y_ledger - sum_af - sum_ag.dot(next.v) + sum_agx + sum_Eb -
               0.5 * (next.v - next.x0).squaredNorm() + half_w_dist;
      rec.G = rec.AG / next.A;
      rec.gap_bound = (half_w_dist + sum_E) / next.A;
    } else {
      rec.E = {nan, nan, nan};
      rec.E_stderr = {nan, nan, nan};
      rec.G = rec.AG = rec.gap_bound = nan;
    }

    const CallCounts cc = counted.counts();
    rec.oracle_calls_total = static_cast<std::int64_t>(cc.total());
    rec.rounds_total = res.rounds;
    res.records.push_back(rec);
    prev_ratio = rec.step_ratio;
    s = std::move(next);

    if (opt.f_star && opt.stop_gap && f_y - *opt.f_star <= *opt.stop_gap) {
      res.status = RunStatus::TargetReached;
      break;
    }
    if (opt.max_oracle_calls > 0 && rec.oracle_calls_total >= opt.max_oracle_calls && k + 1 < opt.iters) {
      res.status = RunStatus::BudgetExhausted;
      break;
    }
  }

  const CallCounts cc = counted.counts();
  res.oracle_calls = static_cast<std::int64_t>(cc.total());
  res.queries_outside_unit_ball = static_cast<std::int64_t>(cc.outside_unit_ball);
  res.final_state = std::move(s);
  return res;
}

AgdResult run_agd(const BenchFunction& fn, AgdOptions opt) {
  if (!opt.w && fn.minimizer) opt.w = fn.minimizer;
  if (!opt.f_star && fn.f_star) opt.f_star = fn.f_star;
  return run_agd(fn.f(), opt);
}

}  // namespace bvg
