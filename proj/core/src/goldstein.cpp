#include "bvg/goldstein.hpp"

#include "bvg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bvg {

int perturbation_exponent(double M, double eps) {
  if (!(M > 0.0) || !(eps > 0.0)) throw std::invalid_argument("perturbation_exponent: M and eps must be positive");
  return std::max(1, static_cast<int>(std::ceil(std::log2(12.0 * M / eps))));
}

DescentCheck descent_test(const Oracle& o, const Vec& x, double f_x, const Vec& g, double delta) {
  const double gn = g.norm();
  if (!(gn > 0.0)) throw std::invalid_argument("descent_test: g must be nonzero");
  DescentCheck out;
  out.f_trial = o.value(x - (delta / gn) * g);
  out.descent = out.f_trial - f_x <= -0.5 * delta * gn;
  return out;
}

bool descent_test(const Oracle& o, const Vec& x, const Vec& g, double delta) {
  return descent_test(o, x, o.value(x), g, delta).descent;
}

InnerUpdate inner_update(const Oracle& o, const Vec& x, const Vec& g, const IngdConfig& cfg, int p, RngStream& rng) {
  const Eigen::Index d = x.size();
  const double radius = std::ldexp(1.0, -p);
  Vec h;
  do {
    h = g + radius * sample_unit_ball(d, rng);
  } while (!(h.norm() > 0.0));
  InnerUpdate out;
  out.y = sample_segment(x, x - (cfg.delta / h.norm()) * h, rng);
  const Vec u = o.subgradient(out.y);
  out.lambda = std::min(1.0, g.squaredNorm() / (3.0 * cfg.lhat * cfg.lhat));
  out.g_tilde = g + out.lambda * (u - g);
  return out;
}

bool accept_candidate(const Vec& g, const Vec& g_tilde, double lhat) {
  const double g2 = g.squaredNorm();
  const double t2 = g_tilde.squaredNorm();
  return t2 <= g2 - g2 * g2 / (18.0 * lhat * lhat) || t2 <= 0.75 * g2;
}

namespace {

void validate(const Oracle& o, const Vec& x0, const IngdConfig& cfg) {
  require_dim(x0, o.dim(), "run_ingd");
  if (!(cfg.delta > 0.0) || !(cfg.eps > 0.0) || !(cfg.M > 0.0) || !(cfg.lhat > 0.0)) {
    throw std::invalid_argument("run_ingd: delta, eps, M, lhat must be positive");
  }
  if (cfg.max_outer < 1 || cfg.max_inner < 1) throw std::invalid_argument("run_ingd: budgets must be positive");
  if (!(cfg.failure_beta > 0.0 && cfg.failure_beta < 1.0)) {
    throw std::invalid_argument("run_ingd: failure_beta must lie in (0, 1)");
  }
  if (cfg.adaptive_p && cfg.patience < 1) throw std::invalid_argument("run_ingd: patience must be >= 1");
}

// After g <- (1 - lambda) g + lambda u(y): scale old weights, append y.
void absorb(std::vector<WitnessPoint>& witness, const Vec& y, double lambda) {
  for (auto& w : witness) w.weight *= (1.0 - lambda);
  witness.erase(std::remove_if(witness.begin(), witness.end(), [](const WitnessPoint& w) { return w.weight <= 0.0; }),
                witness.end());
  witness.push_back({y, lambda});
  double total = 0.0;
  for (const auto& w : witness) total += w.weight;
  for (auto& w : witness) w.weight /= total;
}

}  // namespace

IngdCertificate run_ingd(const Oracle& o, const Vec& x0, const IngdConfig& cfg) {
  validate(o, x0, cfg);
  CountingOracle counted(o);
  auto calls = [&] { return static_cast<std::int64_t>(counted.counts().total()); };
  auto over_budget = [&] { return cfg.max_queries > 0 && calls() >= cfg.max_queries; };

  IngdCertificate cert;
  cert.final_p = perturbation_exponent(cfg.M, cfg.eps);
  int p = cert.final_p;
  const Eigen::Index d = x0.size();

  Vec x = x0;
  double f_x = counted.value(x);
  Vec g;
  std::vector<WitnessPoint> witness;

  auto finish = [&](bool success, const char* status) {
    cert.success = success;
    cert.status = status;
    cert.x_out = x;
    cert.g_out = g;
    cert.witness = witness;
    cert.total_oracle_calls = calls();
    cert.final_p = p;
    return cert;
  };

  for (std::int64_t k = 0; k < cfg.max_outer; ++k) {
    RngStream rng = cfg.rng.split(static_cast<std::uint64_t>(k));
    IngdLogRow row;
    row.k = k;
    row.f_x = f_x;

    const Vec u = x + cfg.delta * sample_unit_ball(d, rng);
    g = counted.subgradient(u);
    witness.assign(1, WitnessPoint{u, 1.0});

    for (;;) {
      if (g.norm() <= cfg.eps) {
        row.g_norm = g.norm();
        row.oracle_calls_total = calls();
        cert.log.push_back(row);
        return finish(true, "stationary");
      }
      if (over_budget()) {
        row.g_norm = g.norm();
        row.oracle_calls_total = calls();
        cert.log.push_back(row);
        return finish(false, "query-budget");
      }
      const DescentCheck dc = descent_test(counted, x, f_x, g, cfg.delta);
      if (dc.descent) {
        row.g_norm = g.norm();
        row.descent = true;
        x = x - (cfg.delta / g.norm()) * g;
        f_x = dc.f_trial;
        ++cert.descent_steps;
        break;
      }

      std::int64_t draws = 0;
      for (;;) {
        if (draws >= cfg.max_inner || over_budget()) {
          row.inner_len += draws;
          row.g_norm = g.norm();
          row.oracle_calls_total = calls();
          cert.log.push_back(row);
          cert.inner_loop_lengths.push_back(draws);
          return finish(false, draws >= cfg.max_inner ? "inner-cap" : "query-budget");
        }
        ++draws;
        InnerUpdate up = inner_update(counted, x, g, cfg, p, rng);
        if (accept_candidate(g, up.g_tilde, cfg.lhat)) {
          absorb(witness, up.y, up.lambda);
          g = std::move(up.g_tilde);
          break;
        }
        if (cfg.adaptive_p && draws % cfg.patience == 0) ++p;
      }
      row.inner_len += draws;
      cert.inner_loop_lengths.push_back(draws);
    }
    row.oracle_calls_total = calls();
    cert.log.push_back(row);
  }
  // Out of outer iterations: report the state at the current point.
  RngStream rng = cfg.rng.split(static_cast<std::uint64_t>(cfg.max_outer));
  const Vec u = x + cfg.delta * sample_unit_ball(d, rng);
  g = counted.subgradient(u);
  witness.assign(1, WitnessPoint{u, 1.0});
  return finish(g.norm() <= cfg.eps, g.norm() <= cfg.eps ? "stationary" : "outer-cap");
}

CertificateCheck validate_certificate(const Oracle& o, const IngdCertificate& cert, double delta, double eps) {
  CertificateCheck out;
  if (cert.witness.empty() || cert.g_out.size() != o.dim() || cert.x_out.size() != o.dim()) return out;
  Vec combo = Vec::Zero(o.dim());
  double max_grad = 0.0;
  bool weights_ok = true;
  for (const auto& w : cert.witness) {
    if (!(w.weight >= 0.0)) weights_ok = false;
    const Vec gamma = o.subgradient(w.point);
    max_grad = std::max(max_grad, gamma.norm());
    combo += w.weight * gamma;
    out.weight_sum += w.weight;
    out.max_distance = std::max(out.max_distance, (w.point - cert.x_out).norm());
  }
  out.recombination_error = (combo - cert.g_out).norm();
  out.g_norm = cert.g_out.norm();
  out.valid = weights_ok && std::abs(out.weight_sum - 1.0) <= 1e-9 &&
              out.max_distance <= delta * (1.0 + 1e-12) &&
              out.recombination_error <= 1e-9 * std::max(1.0, max_grad) && out.g_norm <= eps;
  return out;
}

std::int64_t ingd_descent_cap(double Delta, double eps, double delta) {
  if (!(Delta >= 0.0) || !(eps > 0.0) || !(delta > 0.0)) throw std::invalid_argument("ingd_descent_cap: bad input");
  return static_cast<std::int64_t>(std::ceil(2.0 * Delta / (eps * delta)));
}

std::int64_t ingd_inner_cap(double lhat, double eps, std::int64_t K, double beta) {
  if (!(lhat > 0.0) || !(eps > 0.0) || !(beta > 0.0 && beta < 1.0)) {
    throw std::invalid_argument("ingd_inner_cap: bad input");
  }
  const double Kd = std::max<double>(1.0, static_cast<double>(K));
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil(15.0 * lhat * lhat / (eps * eps) * std::log(Kd / beta))));
}

double ingd_query_bound(double Delta, double lhat, double eps, double delta, double beta) {
  const std::int64_t K = ingd_descent_cap(Delta, eps, delta);
  const std::int64_t J = ingd_inner_cap(lhat, eps, K, beta);
  return static_cast<double>(K + 1) * static_cast<double>(J);
}

}  // namespace bvg
