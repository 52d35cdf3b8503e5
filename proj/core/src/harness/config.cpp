#include "bvg/harness/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bvg::harness {

using nlohmann::json;

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::AgdExact:
      return "agd-exact";
    case Algorithm::AgdSmoothed:
      return "agd-smoothed";
    case Algorithm::Ingd:
      return "ingd";
    case Algorithm::SubgradientBaseline:
      return "subgradient-baseline";
  }
  return "unknown";
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) fail(where, "unknown key '" + key + "'");
  }
}

const json& need(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where, "missing required key '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(where, "expected a finite number");
  return x;
}

double positive(const json& v, const std::string& where) {
  const double x = number(v, where);
  if (!(x > 0.0)) fail(where, "must be positive");
  return x;
}

std::int64_t integer(const json& v, const std::string& where, std::int64_t min_value) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    fail(where, "integer out of range");
  }
  const auto x = v.get<std::int64_t>();
  if (x < min_value) fail(where, "must be >= " + std::to_string(min_value));
  return x;
}

Vec vector_of(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where, "expected a non-empty array of numbers");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = number(v[i], where);
  return out;
}

template <class T>
void opt_positive(const json& obj, const char* key, std::optional<T>& dst, const std::string& where) {
  if (const auto it = obj.find(key); it != obj.end()) dst = positive(*it, where + "." + key);
}

ParamMap params_of(const json& obj, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  ParamMap out;
  for (const auto& [key, v] : obj.items()) {
    const std::string at = where + "." + key;
    if (v.is_number()) {
      out[key] = number(v, at);
    } else if (v.is_array() && !v.empty() && v[0].is_array()) {
      std::vector<std::vector<double>> rows;
      for (const auto& row : v) {
        if (!row.is_array()) fail(at, "expected an array of arrays");
        std::vector<double> r;
        for (const auto& e : row) r.push_back(number(e, at));
        rows.push_back(std::move(r));
      }
      out[key] = std::move(rows);
    } else if (v.is_array()) {
      std::vector<double> r;
      for (const auto& e : v) r.push_back(number(e, at));
      out[key] = std::move(r);
    } else {
      fail(at, "expected a number or an array");
    }
  }
  return out;
}

FeasibleSet set_of(const json& obj) {
  const std::string where = "feasible_set";
  const json& type = need(obj, "type", where);
  if (!type.is_string()) fail(where + ".type", "expected a string");
  const auto t = type.get<std::string>();
  try {
    if (t == "whole-space") {
      only_keys(obj, where, {"type"});
      return FeasibleSet::whole_space();
    }
    if (t == "ball") {
      only_keys(obj, where, {"type", "center", "radius"});
      return FeasibleSet::ball(vector_of(need(obj, "center", where), where + ".center"),
                               positive(need(obj, "radius", where), where + ".radius"));
    }
    if (t == "box") {
      only_keys(obj, where, {"type", "lower", "upper"});
      return FeasibleSet::box(vector_of(need(obj, "lower", where), where + ".lower"),
                              vector_of(need(obj, "upper", where), where + ".upper"));
    }
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
  fail(where + ".type", "unknown set type '" + t + "'");
}

AlgorithmSpec algorithm_of(const json& obj, const std::string& where) {
  only_keys(obj, where, {"name", "params"});
  const json& name = need(obj, "name", where);
  if (!name.is_string()) fail(where + ".name", "expected a string");
  const auto n = name.get<std::string>();
  const json empty = json::object();
  const auto pit = obj.find("params");
  const json& p = pit == obj.end() ? empty : *pit;
  const std::string at = where + ".params";

  AlgorithmSpec s;
  if (n == "agd-exact") {
    s.kind = Algorithm::AgdExact;
    only_keys(p, at, {"eps", "stop_gap", "schedule", "r", "lhat", "initial_step"});
  } else if (n == "agd-smoothed") {
    s.kind = Algorithm::AgdSmoothed;
    only_keys(p, at,
              {"eps", "stop_gap", "r", "lhat", "minibatch", "beta", "lambda_r", "L_r", "diagnostic_samples",
               "threads"});
  } else if (n == "ingd") {
    s.kind = Algorithm::Ingd;
    only_keys(p, at, {"eps", "delta", "M", "lhat", "max_inner", "failure_beta", "adaptive_p", "patience"});
  } else if (n == "subgradient-baseline") {
    s.kind = Algorithm::SubgradientBaseline;
    only_keys(p, at, {"eps", "stop_gap", "step", "M"});
  } else {
    fail(where + ".name", "unknown algorithm '" + n + "'");
  }

  if (const auto it = p.find("eps"); it != p.end()) s.eps = positive(*it, at + ".eps");
  opt_positive(p, "stop_gap", s.stop_gap, at);
  opt_positive(p, "r", s.r, at);
  opt_positive(p, "lhat", s.lhat, at);
  opt_positive(p, "beta", s.beta, at);
  opt_positive(p, "lambda_r", s.lambda_r, at);
  opt_positive(p, "L_r", s.L_r, at);
  opt_positive(p, "M", s.M, at);
  opt_positive(p, "step", s.step, at);
  if (const auto it = p.find("schedule"); it != p.end()) {
    if (!it->is_string()) fail(at + ".schedule", "expected a string");
    const auto v = it->get<std::string>();
    if (v == "bvg") {
      s.schedule = ScheduleMode::DeterministicBvg;
    } else if (v == "backtracking") {
      s.schedule = ScheduleMode::Backtracking;
    } else {
      fail(at + ".schedule", "expected 'bvg' or 'backtracking'");
    }
  }
  if (s.kind == Algorithm::AgdSmoothed) s.schedule = ScheduleMode::StochasticBeta;
  if (const auto it = p.find("initial_step"); it != p.end()) s.initial_step = positive(*it, at + ".initial_step");
  if (const auto it = p.find("minibatch"); it != p.end()) s.minibatch = integer(*it, at + ".minibatch", 1);
  if (const auto it = p.find("diagnostic_samples"); it != p.end()) {
    s.diagnostic_samples = integer(*it, at + ".diagnostic_samples", 0);
    if (s.diagnostic_samples == 1) fail(at + ".diagnostic_samples", "must be 0 or >= 2");
  }
  if (const auto it = p.find("threads"); it != p.end()) {
    s.threads = static_cast<unsigned>(integer(*it, at + ".threads", 1));
  }
  if (const auto it = p.find("delta"); it != p.end()) s.delta = positive(*it, at + ".delta");
  if (const auto it = p.find("max_inner"); it != p.end()) s.max_inner = integer(*it, at + ".max_inner", 1);
  if (const auto it = p.find("failure_beta"); it != p.end()) {
    s.failure_beta = number(*it, at + ".failure_beta");
    if (!(s.failure_beta > 0.0 && s.failure_beta < 1.0)) fail(at + ".failure_beta", "must lie in (0, 1)");
  }
  if (const auto it = p.find("adaptive_p"); it != p.end()) {
    if (!it->is_boolean()) fail(at + ".adaptive_p", "expected a boolean");
    s.adaptive_p = it->get<bool>();
  }
  if (const auto it = p.find("patience"); it != p.end()) s.patience = integer(*it, at + ".patience", 1);

  if (s.kind == Algorithm::AgdExact && s.schedule == ScheduleMode::DeterministicBvg && !s.r) {
    fail(at, "agd-exact with the bvg schedule needs 'r'");
  }
  if (s.kind == Algorithm::AgdSmoothed && !s.r) fail(at, "agd-smoothed needs 'r'");
  return s;
}

ConstantsSpec constants_of(const json& obj) {
  const std::string where = "constants";
  only_keys(obj, where, {"radii", "center", "region_radius", "n_pairs", "avg_points", "rho_grid", "n_per_rho",
                         "threads"});
  ConstantsSpec c;
  const Vec radii = vector_of(need(obj, "radii", where), where + ".radii");
  for (Eigen::Index i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) fail(where + ".radii", "radii must be positive");
    c.radii.push_back(radii[i]);
  }
  if (const auto it = obj.find("center"); it != obj.end()) c.center = vector_of(*it, where + ".center");
  if (const auto it = obj.find("region_radius"); it != obj.end()) {
    c.region_radius = positive(*it, where + ".region_radius");
  }
  if (const auto it = obj.find("n_pairs"); it != obj.end()) c.n_pairs = integer(*it, where + ".n_pairs", 1);
  if (const auto it = obj.find("avg_points"); it != obj.end()) c.avg_points = integer(*it, where + ".avg_points", 1);
  if (const auto it = obj.find("rho_grid"); it != obj.end()) {
    c.rho_grid = static_cast<int>(integer(*it, where + ".rho_grid", 1));
  }
  if (const auto it = obj.find("n_per_rho"); it != obj.end()) c.n_per_rho = integer(*it, where + ".n_per_rho", 2);
  if (const auto it = obj.find("threads"); it != obj.end()) {
    c.threads = static_cast<unsigned>(integer(*it, where + ".threads", 1));
  }
  return c;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  only_keys(doc, "config",
            {"schema_version", "experiment_id", "function", "x0", "start", "feasible_set", "algorithm", "baseline",
             "constants", "seeds", "budgets", "outputs"});

  ExperimentConfig cfg;
  cfg.schema_version = static_cast<int>(integer(need(doc, "schema_version", "config"), "schema_version", 1));
  if (cfg.schema_version != kSchemaVersion) {
    fail("schema_version", "unsupported version " + std::to_string(cfg.schema_version));
  }

  const json& id = need(doc, "experiment_id", "config");
  if (!id.is_string() || id.get<std::string>().empty()) fail("experiment_id", "expected a non-empty string");
  cfg.experiment_id = id.get<std::string>();
  if (cfg.experiment_id.find_first_of("/\\") != std::string::npos) {
    fail("experiment_id", "must not contain path separators");
  }

  const json& fn = need(doc, "function", "config");
  only_keys(fn, "function", {"name", "params"});
  const json& fname = need(fn, "name", "function");
  if (!fname.is_string()) fail("function.name", "expected a string");
  cfg.function.name = fname.get<std::string>();
  if (const auto it = fn.find("params"); it != fn.end()) cfg.function.params = params_of(*it, "function.params");

  if (const auto it = doc.find("x0"); it != doc.end()) cfg.x0 = vector_of(*it, "x0");
  if (const auto it = doc.find("start"); it != doc.end()) {
    if (cfg.x0) fail("start", "give either 'x0' or 'start', not both");
    only_keys(*it, "start", {"distance", "direction"});
    if (const auto d = it->find("distance"); d != it->end()) {
      cfg.start_distance = number(*d, "start.distance");
      if (cfg.start_distance < 0.0) fail("start.distance", "must be >= 0");
    }
    if (const auto d = it->find("direction"); d != it->end()) {
      if (!d->is_string()) fail("start.direction", "expected a string");
      cfg.start_direction = d->get<std::string>();
      if (cfg.start_direction != "e1" && cfg.start_direction != "diagonal") {
        fail("start.direction", "expected 'e1' or 'diagonal'");
      }
    }
  }
  if (const auto it = doc.find("feasible_set"); it != doc.end()) cfg.set = set_of(*it);

  if (const auto it = doc.find("algorithm"); it != doc.end()) cfg.algorithm = algorithm_of(*it, "algorithm");
  if (const auto it = doc.find("baseline"); it != doc.end()) {
    cfg.baseline = algorithm_of(*it, "baseline");
    if (cfg.baseline->kind != Algorithm::SubgradientBaseline) fail("baseline.name", "must be subgradient-baseline");
  }
  if (const auto it = doc.find("constants"); it != doc.end()) cfg.constants = constants_of(*it);
  if (!cfg.algorithm && !cfg.constants) fail("config", "needs 'algorithm' or 'constants'");

  if (const auto it = doc.find("seeds"); it != doc.end()) {
    if (!it->is_array() || it->empty()) fail("seeds", "expected a non-empty array of integers");
    cfg.seeds.clear();
    for (const auto& s : *it) {
      if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
        fail("seeds", "seeds must be non-negative integers");
      }
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (const auto it = doc.find("budgets"); it != doc.end()) {
    only_keys(*it, "budgets", {"iters", "oracle_calls"});
    if (const auto b = it->find("iters"); b != it->end()) cfg.budgets.iters = integer(*b, "budgets.iters", 1);
    if (const auto b = it->find("oracle_calls"); b != it->end()) {
      cfg.budgets.oracle_calls = integer(*b, "budgets.oracle_calls", 0);
    }
  }
  if (const auto it = doc.find("outputs"); it != doc.end()) {
    if (!it->is_string() || it->get<std::string>().empty()) fail("outputs", "expected a non-empty string");
    cfg.outputs = it->get<std::string>();
  }

  // Catches bad function parameters before any computation.
  const BenchFunction f = build_function(cfg);
  if (cfg.x0) {
    if (cfg.x0->size() != f.dim()) fail("x0", "dimension does not match the function");
    if (!cfg.set.contains(*cfg.x0, 1e-9)) fail("x0", "not inside the feasible set");
  }
  if (cfg.constants && cfg.constants->center && cfg.constants->center->size() != f.dim()) {
    fail("constants.center", "dimension does not match the function");
  }
  cfg.canonical = doc.dump();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : cfg.canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

BenchFunction build_function(const ExperimentConfig& cfg) {
  try {
    return make_function(cfg.function.name, cfg.function.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("function: ") + e.what());
  }
}

Vec start_point(const ExperimentConfig& cfg, const BenchFunction& fn) {
  if (cfg.x0) return *cfg.x0;
  const Eigen::Index d = fn.dim();
  Vec base = fn.minimizer.value_or(Vec::Zero(d));
  Vec dir = cfg.start_direction == "diagonal" ? Vec(Vec::Constant(d, 1.0 / std::sqrt(static_cast<double>(d))))
                                              : unit_vector(d, 0);
  Vec x0 = base + cfg.start_distance * dir;
  if (!cfg.set.contains(x0, 1e-9)) throw ConfigError("start: implied start point is outside the feasible set");
  return x0;
}

}  // namespace bvg::harness
