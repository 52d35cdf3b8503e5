#include "bvg/harness/experiment.hpp"

#include "bvg/analysis.hpp"
#include "bvg/goldstein.hpp"
#include "bvg/harness/output.hpp"
#include "bvg/harness/subgradient_baseline.hpp"
#include "bvg/sampling.hpp"
#include "bvg/smoothing.hpp"

#include <json.hpp>

#include <cmath>
#include <iostream>
#include <limits>

namespace bvg::harness {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double lhat_at(const AlgorithmSpec& spec, const BenchFunction& fn, double r, const char* who) {
  if (spec.lhat) return *spec.lhat;
  if (const auto l = fn.lhat(r)) return *l;
  throw ConfigError(std::string(who) + ": function has no tabulated L-hat; set 'lhat'");
}

double gap_of(const BenchFunction& fn, double value) { return fn.f_star ? value - *fn.f_star : kNaN; }

AgdOptions agd_options(const ExperimentConfig& cfg, const AlgorithmSpec& spec, const BenchFunction& fn,
                       const Vec& x0, std::uint64_t seed) {
  AgdOptions opt;
  opt.set = cfg.set;
  opt.x0 = x0;
  opt.iters = cfg.budgets.iters;
  opt.max_oracle_calls = cfg.budgets.oracle_calls;
  opt.stop_gap = spec.stop_gap;
  opt.rng = RngStream(seed);
  opt.schedule.eps = spec.eps;
  opt.schedule.initial_step = spec.initial_step;
  opt.schedule.mode = spec.schedule;

  if (spec.kind == Algorithm::AgdExact) {
    opt.grad_mode = GradMode::Exact;
    if (spec.schedule == ScheduleMode::DeterministicBvg) {
      opt.schedule.r = *spec.r;
      opt.schedule.lhat = lhat_at(spec, fn, *spec.r, "agd-exact");
    }
    return opt;
  }

  const double r = *spec.r;
  opt.grad_mode = GradMode::Smoothed;
  opt.smoothing_r = r;
  opt.minibatch = spec.minibatch;
  opt.diagnostic_samples = spec.diagnostic_samples;
  opt.threads = spec.threads;
  opt.schedule.r = r;
  if (spec.beta) {
    opt.schedule.beta = spec.beta;
  } else {
    const double lhat = lhat_at(spec, fn, r, "agd-smoothed");
    double L_r = 0.0;
    if (spec.L_r) {
      L_r = *spec.L_r;
    } else if (const auto l2 = fn.lhat(2.0 * r)) {
      L_r = *l2;
    } else {
      throw ConfigError("agd-smoothed: set 'L_r' or 'beta'");
    }
    const double lambda =
        spec.lambda_r.value_or(smoothness_constant(r, L_r, lhat, static_cast<double>(fn.dim())));
    if (!fn.minimizer) throw ConfigError("agd-smoothed: function has no known minimizer; set 'beta'");
    const double D = (x0 - *fn.minimizer).norm();
    if (!(D > 0.0)) throw ConfigError("agd-smoothed: start point equals the minimizer; set 'beta'");
    opt.schedule.lhat = lhat;
    opt.schedule.lambda_r = lambda;
    opt.schedule.beta = smoothed_beta(lambda, D, L_r, lhat, cfg.budgets.iters);
  }
  return opt;
}

SeedRun run_agd_seed(const ExperimentConfig& cfg, const AlgorithmSpec& spec, const BenchFunction& fn,
                     const Vec& x0, std::uint64_t seed) {
  const AgdResult res = run_agd(fn, agd_options(cfg, spec, fn, x0, seed));
  CsvWriter csv({"k", "a_k", "A_k", "f_yk", "gap", "G", "gap_bound", "E_s", "E_b", "E_v", "E_s_stderr", "E_b_stderr",
                 "E_v_stderr", "step_ratio", "halvings", "oracle_calls_total", "rounds_total"});
  for (const auto& r : res.records) {
    csv.cell(static_cast<long long>(r.k))
        .cell(r.a)
        .cell(r.A)
        .cell(r.f_y)
        .cell(gap_of(fn, r.f_y))
        .cell(r.G)
        .cell(r.gap_bound)
        .cell(r.E.E_s)
        .cell(r.E.E_b)
        .cell(r.E.E_v)
        .cell(r.E_stderr.E_s)
        .cell(r.E_stderr.E_b)
        .cell(r.E_stderr.E_v)
        .cell(r.step_ratio)
        .cell(static_cast<long long>(r.halvings))
        .cell(static_cast<long long>(r.oracle_calls_total))
        .cell(static_cast<long long>(r.rounds_total));
    csv.end_row();
  }
  SeedRun out;
  out.seed = seed;
  out.algorithm = spec.kind;
  out.status = to_string(res.status);
  out.csv = csv.str();
  out.rounds = {res.rounds, res.oracle_calls, res.queries_outside_unit_ball};
  out.iterations = static_cast<std::int64_t>(res.records.size());
  out.final_value = res.records.empty() ? kNaN : res.records.back().f_y;
  out.final_gap = gap_of(fn, out.final_value);
  out.final_certificate = res.records.empty() ? kNaN : res.records.back().G;
  return out;
}

SeedRun run_ingd_seed(const ExperimentConfig& cfg, const AlgorithmSpec& spec, const BenchFunction& fn,
                      const Vec& x0, std::uint64_t seed) {
  IngdConfig c;
  c.delta = spec.delta;
  c.eps = spec.eps;
  if (spec.M) {
    c.M = *spec.M;
  } else if (fn.lipschitz_M) {
    c.M = *fn.lipschitz_M;
  } else {
    throw ConfigError("ingd: function has no Lipschitz constant; set 'M'");
  }
  c.lhat = lhat_at(spec, fn, 2.0 * spec.delta, "ingd");
  c.max_outer = cfg.budgets.iters;
  c.max_queries = cfg.budgets.oracle_calls;
  c.failure_beta = spec.failure_beta;
  c.adaptive_p = spec.adaptive_p;
  c.patience = spec.patience;
  c.rng = RngStream(seed);
  if (spec.max_inner) {
    c.max_inner = *spec.max_inner;
  } else if (fn.f_star) {
    const double Delta = std::max(0.0, fn.f().value(x0) - *fn.f_star);
    c.max_inner = ingd_inner_cap(c.lhat, c.eps, ingd_descent_cap(Delta, c.eps, c.delta), c.failure_beta);
  } else {
    throw ConfigError("ingd: f* unknown, so the default inner cap is undefined; set 'max_inner'");
  }

  const IngdCertificate cert = run_ingd(fn.f(), x0, c);
  CsvWriter csv({"k", "f_xk", "g_norm", "inner_len", "descent", "oracle_calls_total"});
  for (const auto& r : cert.log) {
    csv.cell(static_cast<long long>(r.k))
        .cell(r.f_x)
        .cell(r.g_norm)
        .cell(static_cast<long long>(r.inner_len))
        .cell(r.descent)
        .cell(static_cast<long long>(r.oracle_calls_total));
    csv.end_row();
  }
  SeedRun out;
  out.seed = seed;
  out.algorithm = spec.kind;
  out.status = cert.status;
  out.csv = csv.str();
  // Every INGD query depends on the previous one.
  out.rounds = {cert.total_oracle_calls, cert.total_oracle_calls, 0};
  out.iterations = static_cast<std::int64_t>(cert.log.size());
  out.final_value = fn.f().value(cert.x_out);
  out.final_gap = gap_of(fn, out.final_value);
  out.final_certificate = kNaN;
  out.certificate_valid = cert.success && validate_certificate(fn.f(), cert, c.delta, c.eps).valid;
  out.descent_steps = cert.descent_steps;
  out.g_norm = cert.g_out.norm();
  return out;
}

SeedRun run_baseline_seed(const ExperimentConfig& cfg, const AlgorithmSpec& spec, const BenchFunction& fn,
                          const Vec& x0, std::uint64_t seed) {
  SubgradientOptions opt;
  opt.set = cfg.set;
  opt.x0 = x0;
  opt.iters = cfg.budgets.iters;
  opt.max_oracle_calls = cfg.budgets.oracle_calls;
  opt.f_star = fn.f_star;
  opt.stop_gap = spec.stop_gap.value_or(spec.eps);
  if (spec.step) {
    opt.step = *spec.step;
  } else {
    double M = 0.0;
    if (spec.M) {
      M = *spec.M;
    } else if (fn.lipschitz_M && *fn.lipschitz_M > 0.0) {
      M = *fn.lipschitz_M;
    } else {
      throw ConfigError("subgradient-baseline: set 'step' or 'M'");
    }
    opt.step = spec.eps / (M * M);
  }
  const SubgradientResult res = run_subgradient(fn.f(), opt);
  CsvWriter csv({"k", "f_x", "best_f", "gap", "oracle_calls_total"});
  for (const auto& r : res.records) {
    csv.cell(static_cast<long long>(r.k))
        .cell(r.f_x)
        .cell(r.best_f)
        .cell(gap_of(fn, r.best_f))
        .cell(static_cast<long long>(r.oracle_calls_total));
    csv.end_row();
  }
  SeedRun out;
  out.seed = seed;
  out.algorithm = spec.kind;
  out.status = to_string(res.status);
  out.csv = csv.str();
  out.rounds = {res.rounds, res.oracle_calls, res.queries_outside_unit_ball};
  out.iterations = static_cast<std::int64_t>(res.records.size());
  out.final_value = res.best_f;
  out.final_gap = gap_of(fn, res.best_f);
  out.final_certificate = kNaN;
  return out;
}

std::filesystem::path out_dir_of(const ExperimentConfig& cfg, const RunOptions& opt) {
  return opt.out_dir.empty() ? std::filesystem::path(cfg.outputs) : opt.out_dir;
}

std::string seed_file(const ExperimentConfig& cfg, const std::string& tag, std::uint64_t seed) {
  return cfg.experiment_id + "_" + tag + "_seed" + std::to_string(seed) + ".csv";
}

void write_manifest(const ExperimentConfig& cfg, const std::filesystem::path& dir, const std::string& command,
                    const std::vector<std::string>& files) {
  json m;
  m["experiment_id"] = cfg.experiment_id;
  m["command"] = command;
  m["config_hash"] = config_hash(cfg);
  m["library_version"] = BVG_VERSION;
  m["schema_version"] = cfg.schema_version;
  m["created_utc"] = utc_timestamp();
  m["seeds"] = cfg.seeds;
  m["files"] = files;
  m["config"] = json::parse(cfg.canonical);
  write_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

void say(const RunOptions& opt, const std::string& line) {
  if (!opt.quiet) std::cerr << line << "\n";
}

}  // namespace

SeedRun run_seed(const ExperimentConfig& cfg, const AlgorithmSpec& spec, std::uint64_t seed) {
  const BenchFunction fn = build_function(cfg);
  const Vec x0 = start_point(cfg, fn);
  try {
    switch (spec.kind) {
      case Algorithm::AgdExact:
      case Algorithm::AgdSmoothed:
        return run_agd_seed(cfg, spec, fn, x0, seed);
      case Algorithm::Ingd:
        return run_ingd_seed(cfg, spec, fn, x0, seed);
      case Algorithm::SubgradientBaseline:
        return run_baseline_seed(cfg, spec, fn, x0, seed);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(to_string(spec.kind) + ": " + e.what());
  }
  throw ConfigError("unknown algorithm");
}

std::string summary_json(const ExperimentConfig& cfg, const SeedRun& run) {
  json j;
  j["experiment_id"] = cfg.experiment_id;
  j["seed"] = run.seed;
  j["algorithm"] = to_string(run.algorithm);
  j["status"] = run.status;
  j["final_gap"] = run.final_gap;
  j["final_value"] = run.final_value;
  j["final_certificate"] = run.final_certificate;
  j["iterations"] = run.iterations;
  j["sequential_rounds"] = run.rounds.sequential_rounds;
  j["total_oracle_calls"] = run.rounds.total_oracle_calls;
  j["queries_outside_unit_ball"] = run.rounds.queries_outside_unit_ball;
  if (run.algorithm == Algorithm::Ingd) {
    j["certificate_valid"] = run.certificate_valid;
    j["descent_steps"] = run.descent_steps;
    j["g_norm"] = run.g_norm;
  }
  return j.dump();
}

RunReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (!cfg.algorithm) throw ConfigError("run: config has no 'algorithm'");
  RunReport rep;
  const std::string tag = to_string(cfg.algorithm->kind);
  // Compute everything first so a config problem surfacing mid-run leaves no files.
  for (const std::uint64_t seed : cfg.seeds) {
    rep.runs.push_back(run_seed(cfg, *cfg.algorithm, seed));
    const SeedRun& run = rep.runs.back();
    say(opt, tag + " seed " + std::to_string(seed) + ": " + run.status + ", gap " + format_double(run.final_gap));
  }
  rep.out_dir = out_dir_of(cfg, opt);
  ensure_directory(rep.out_dir);
  std::vector<std::string> files;
  std::string summary;
  for (const SeedRun& run : rep.runs) {
    const std::string name = seed_file(cfg, tag, run.seed);
    write_atomic(rep.out_dir / name, run.csv);
    files.push_back(name);
    summary += summary_json(cfg, run) + "\n";
  }
  write_atomic(rep.out_dir / "summary.jsonl", summary);
  files.push_back("summary.jsonl");
  write_manifest(cfg, rep.out_dir, "run", files);
  return rep;
}

std::vector<DepthReport> depth_comparison(const ExperimentConfig& cfg) {
  if (!cfg.algorithm || !cfg.baseline) throw ConfigError("depth-compare: needs 'algorithm' and 'baseline'");
  if (cfg.algorithm->kind != Algorithm::AgdSmoothed && cfg.algorithm->kind != Algorithm::AgdExact) {
    throw ConfigError("depth-compare: algorithm must be agd-smoothed or agd-exact");
  }
  AlgorithmSpec alg = *cfg.algorithm;
  AlgorithmSpec base = *cfg.baseline;
  if (alg.eps != base.eps) throw ConfigError("depth-compare: algorithm and baseline target different eps");
  const double target_alg = alg.stop_gap.value_or(alg.eps);
  const double target_base = base.stop_gap.value_or(base.eps);
  if (target_alg != target_base) throw ConfigError("depth-compare: algorithm and baseline stop at different gaps");
  if (!build_function(cfg).f_star) throw ConfigError("depth-compare: function needs a known f*");
  alg.stop_gap = target_alg;
  base.stop_gap = target_base;

  std::vector<DepthReport> out;
  for (const std::uint64_t seed : cfg.seeds) {
    DepthReport rep;
    rep.seed = seed;
    rep.smoothed = run_seed(cfg, alg, seed);
    rep.baseline = run_seed(cfg, base, seed);
    rep.round_ratio = static_cast<double>(rep.baseline.rounds.sequential_rounds) /
                      static_cast<double>(std::max<std::int64_t>(1, rep.smoothed.rounds.sequential_rounds));
    out.push_back(std::move(rep));
  }
  return out;
}

RunReport run_depth_comparison(const ExperimentConfig& cfg, const RunOptions& opt) {
  const std::vector<DepthReport> reps = depth_comparison(cfg);
  RunReport rep;
  rep.out_dir = out_dir_of(cfg, opt);
  ensure_directory(rep.out_dir);
  CsvWriter csv({"seed", "method", "eps", "sequential_rounds", "total_oracle_calls", "queries_outside_unit_ball",
                 "final_gap", "status"});
  std::vector<std::string> files{"depth.csv"};
  std::string summary;
  for (const auto& d : reps) {
    for (const SeedRun* run : {&d.smoothed, &d.baseline}) {
      const std::string tag = to_string(run->algorithm);
      csv.cell(static_cast<long long>(d.seed))
          .cell(tag)
          .cell(cfg.algorithm->eps)
          .cell(static_cast<long long>(run->rounds.sequential_rounds))
          .cell(static_cast<long long>(run->rounds.total_oracle_calls))
          .cell(static_cast<long long>(run->rounds.queries_outside_unit_ball))
          .cell(run->final_gap)
          .cell(run->status);
      csv.end_row();
      const std::string name = seed_file(cfg, tag, d.seed);
      write_atomic(rep.out_dir / name, run->csv);
      files.push_back(name);
      summary += summary_json(cfg, *run) + "\n";
      rep.runs.push_back(*run);
    }
    say(opt, "seed " + std::to_string(d.seed) + ": round ratio " + format_double(d.round_ratio));
  }
  write_atomic(rep.out_dir / "depth.csv", csv.str());
  write_atomic(rep.out_dir / "summary.jsonl", summary);
  files.push_back("summary.jsonl");
  write_manifest(cfg, rep.out_dir, "depth-compare", files);
  return rep;
}

std::vector<ConstantsRow> estimate_constants(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (!cfg.constants) throw ConfigError("estimate-constants: config has no 'constants'");
  const ConstantsSpec& cs = *cfg.constants;
  const BenchFunction fn = build_function(cfg);
  const Eigen::Index d = fn.dim();
  const Vec center = cs.center.value_or(fn.minimizer.value_or(Vec::Zero(d)));
  const RngStream root(seed);

  std::vector<ConstantsRow> rows;
  for (std::size_t i = 0; i < cs.radii.size(); ++i) {
    const double r = cs.radii[i];
    const RngStream base = root.split(i);
    const BvgReport mx = estimate_bvg_max(fn.f(), center, cs.region_radius, r, cs.n_pairs, base.split(0), cs.threads);
    RngStream pts_rng = base.split(1);
    std::vector<Vec> points;
    points.reserve(static_cast<std::size_t>(cs.avg_points));
    for (std::int64_t p = 0; p < cs.avg_points; ++p) {
      points.push_back(center + cs.region_radius * sample_unit_ball(d, pts_rng));
    }
    const BvgReport avg = estimate_bvg_avg(fn.f(), points, r, cs.rho_grid, cs.n_per_rho, base.split(2), cs.threads);
    rows.push_back({r, mx.lhat_estimate, fn.lhat(r).value_or(kNaN), avg.lavg_estimate, avg.lavg_stderr});
  }
  return rows;
}

RunReport run_estimate_constants(const ExperimentConfig& cfg, const RunOptions& opt) {
  std::vector<std::vector<ConstantsRow>> tables;
  for (const std::uint64_t seed : cfg.seeds) tables.push_back(estimate_constants(cfg, seed));
  RunReport rep;
  rep.out_dir = out_dir_of(cfg, opt);
  ensure_directory(rep.out_dir);
  std::vector<std::string> files;
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    const std::uint64_t seed = cfg.seeds[i];
    CsvWriter csv({"r", "lhat_estimate", "lhat_tabulated", "lavg_estimate", "lavg_stderr"});
    for (const auto& row : tables[i]) {
      csv.cell(row.r).cell(row.lhat_estimate).cell(row.lhat_tabulated).cell(row.lavg_estimate).cell(row.lavg_stderr);
      csv.end_row();
    }
    const std::string name = seed_file(cfg, "constants", seed);
    write_atomic(rep.out_dir / name, csv.str());
    files.push_back(name);
    SeedRun run;
    run.seed = seed;
    run.csv = csv.str();
    rep.runs.push_back(std::move(run));
    say(opt, "constants seed " + std::to_string(seed) + " written");
  }
  write_manifest(cfg, rep.out_dir, "estimate-constants", files);
  return rep;
}

}  // namespace bvg::harness
