#include "bvg/harness/config.hpp"
#include "bvg/harness/experiment.hpp"
#include "bvg/harness/output.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bvg;
using namespace bvg::harness;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("bvgopt_test_" + name);
  fs::remove_all(d);
  return d;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

const char* kQuadratic = R"({
  "schema_version": 1,
  "experiment_id": "quad",
  "function": {"name": "smooth_quadratic", "params": {"d": 5}},
  "start": {"distance": 1.0, "direction": "diagonal"},
  "algorithm": {"name": "agd-exact", "params": {"eps": 0.05, "r": 0.5}},
  "seeds": [1, 2],
  "budgets": {"iters": 200}
})";

const char* kIngd = R"({
  "schema_version": 1,
  "experiment_id": "ingd",
  "function": {"name": "abs_first", "params": {"d": 2}},
  "x0": [1.0, 0.0],
  "algorithm": {"name": "ingd", "params": {"eps": 0.1, "delta": 0.25, "M": 1, "lhat": 2}},
  "seeds": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19],
  "budgets": {"iters": 1000}
})";

std::string depth_config(double alg_eps, double base_eps, int minibatch) {
  std::ostringstream s;
  s << R"({"schema_version": 1, "experiment_id": "depth",
    "function": {"name": "abs_first", "params": {"d": 1}},
    "x0": [1.0],
    "algorithm": {"name": "agd-smoothed", "params": {"eps": )"
    << alg_eps << R"(, "r": 0.05, "minibatch": )" << minibatch << R"(, "beta": 0.01}},
    "baseline": {"name": "subgradient-baseline", "params": {"eps": )"
    << base_eps << R"(, "M": 1}},
    "seeds": [3],
    "budgets": {"iters": 20000}})";
  return s.str();
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(read_file(fs::path(BVG_TEST_DATA_DIR) / "unknown_key.json")), ConfigError);
    CHECK_THROWS_AS(parse_config(read_file(fs::path(BVG_TEST_DATA_DIR) / "malformed_missing_name.json")),
                    ConfigError);
    CHECK_THROWS_AS(load_config(fs::path(BVG_TEST_DATA_DIR) / "missing_file.json"), IoError);
    std::string bad_version = kQuadratic;
    bad_version.replace(bad_version.find("\"schema_version\": 1"), 19, "\"schema_version\": 9");
    CHECK_THROWS_AS(parse_config(bad_version), ConfigError);
    std::string no_r = kQuadratic;
    no_r.replace(no_r.find(", \"r\": 0.5"), 10, "");
    CHECK_THROWS_AS(run_seed(parse_config(no_r), *parse_config(no_r).algorithm, 1), ConfigError);
  }

  TEST_CASE("config hash is stable and content sensitive") {
    const auto a = parse_config(kQuadratic);
    CHECK(config_hash(a) == config_hash(parse_config(kQuadratic)));
    CHECK(config_hash(a).size() == 16);
    std::string other = kQuadratic;
    other.replace(other.find("\"d\": 5"), 6, "\"d\": 6");
    CHECK(config_hash(a) != config_hash(parse_config(other)));
  }

  TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(format_double(v)) == v);
  }

  TEST_CASE("run: agd-exact writes trajectories, summary and manifest") {
    const auto dir = fresh_dir("quad");
    const auto cfg = parse_config(kQuadratic);
    const auto rep = run_experiment(cfg, RunOptions{dir, true});
    REQUIRE(rep.runs.size() == 2);
    const auto csv = read_file(dir / "quad_agd-exact_seed1.csv");
    CHECK(count_lines(csv) == 201);
    CHECK(csv.rfind("k,a_k,A_k,f_yk,gap,G,gap_bound,", 0) == 0);
    CHECK(count_lines(read_file(dir / "summary.jsonl")) == 2);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(rep.runs[0].final_gap <= rep.runs[0].final_certificate + 1e-12);
  }

  TEST_CASE("run: reruns are byte identical") {
    const auto cfg = parse_config(kQuadratic);
    const auto d1 = fresh_dir("rerun1"), d2 = fresh_dir("rerun2");
    run_experiment(cfg, RunOptions{d1, true});
    run_experiment(cfg, RunOptions{d2, true});
    for (const char* f : {"quad_agd-exact_seed1.csv", "quad_agd-exact_seed2.csv", "summary.jsonl"}) {
      CAPTURE(f);
      CHECK(read_file(d1 / f) == read_file(d2 / f));
    }
  }

  TEST_CASE("run: ingd over 20 seeds") {
    const auto cfg = parse_config(kIngd);
    int valid = 0;
    for (auto s : cfg.seeds) {
      const auto run = run_seed(cfg, *cfg.algorithm, s);
      valid += run.certificate_valid;
      CHECK(run.rounds.sequential_rounds == run.rounds.total_oracle_calls);
    }
    CHECK(valid >= 18);
  }

  TEST_CASE("depth-compare") {
    CHECK_THROWS_AS(depth_comparison(parse_config(depth_config(0.1, 0.2, 1))), ConfigError);
    const auto reps = depth_comparison(parse_config(depth_config(0.1, 0.1, 1)));
    REQUIRE(reps.size() == 1);
    const auto& r = reps[0];
    CHECK(r.smoothed.rounds.sequential_rounds == r.smoothed.rounds.total_oracle_calls);
    CHECK(r.baseline.rounds.sequential_rounds == r.baseline.rounds.total_oracle_calls);
    CHECK(r.baseline.final_gap <= 0.1);
    CHECK(r.baseline.rounds.sequential_rounds <= 100);
    CHECK(r.round_ratio == doctest::Approx(static_cast<double>(r.baseline.rounds.sequential_rounds) /
                                           static_cast<double>(r.smoothed.rounds.sequential_rounds)));

    const auto m8 = depth_comparison(parse_config(depth_config(0.1, 0.1, 8)));
    CHECK(m8[0].smoothed.rounds.total_oracle_calls == 8 * m8[0].smoothed.rounds.sequential_rounds);
  }

  TEST_CASE("rounds accounting matches the trajectory CSV") {
    const auto cfg = parse_config(kQuadratic);
    const auto run = run_seed(cfg, *cfg.algorithm, 1);
    std::istringstream in(run.csv);
    std::string line, last;
    std::getline(in, line);
    while (std::getline(in, line)) last = line;
    std::vector<std::string> cells;
    std::stringstream ls(last);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 17);
    CHECK(std::stoll(cells[15]) == run.rounds.total_oracle_calls);
    CHECK(std::stoll(cells[16]) == run.rounds.sequential_rounds);
  }
}
