#include "bvg/feasible_set.hpp"
#include "bvg/oracle.hpp"
#include "bvg/parallel.hpp"
#include "bvg/rng.hpp"
#include "bvg/sampling.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>

using namespace bvg;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

// Mean and standard error of a scalar sample.
struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

template <class F>
Moments moments(int n, F draw) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = draw();
    s += v;
    s2 += v * v;
  }
  const double mean = s / n;
  const double var = (s2 - n * mean * mean) / (n - 1);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("project: whole space is the identity") {
    CHECK(project(FeasibleSet::whole_space(), v2(3, -2)) == v2(3, -2));
  }

  TEST_CASE("project: ball scales radially") {
    const auto b = FeasibleSet::ball(Vec::Zero(2), 1.0);
    const Vec p = project(b, v2(3, 0));
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p[1] == 0.0);
    // Off-center ball: center + (x - center) R / ||x - center||.
    const auto b2 = FeasibleSet::ball(v2(1, 1), 2.0);
    const Vec q = project(b2, v2(1, 5));
    CHECK(q[0] == doctest::Approx(1.0));
    CHECK(q[1] == doctest::Approx(3.0));
  }

  TEST_CASE("project: box clamps coordinates") {
    const auto box = FeasibleSet::box(v2(0, 0), v2(1, 1));
    CHECK(project(box, v2(2, -1)) == v2(1, 0));
  }

  TEST_CASE("project: dimension mismatch throws") {
    const auto b = FeasibleSet::ball(Vec::Zero(3), 1.0);
    CHECK_THROWS_AS(project(b, v2(1, 1)), DimensionError);
  }

  TEST_CASE("feasible set constructors validate input") {
    CHECK_THROWS_AS(FeasibleSet::ball(Vec::Zero(2), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FeasibleSet::ball(Vec::Zero(2), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(FeasibleSet::box(v2(0, 2), v2(1, 1)), std::invalid_argument);
  }

  TEST_CASE("project is idempotent and nonexpansive") {
    RngStream rng(11);
    const std::vector<FeasibleSet> sets{FeasibleSet::whole_space(), FeasibleSet::ball(Vec::Constant(4, 0.5), 1.5),
                                        FeasibleSet::box(Vec::Constant(4, -1.0), Vec::Constant(4, 2.0))};
    for (const auto& s : sets) {
      for (int t = 0; t < 2000; ++t) {
        Vec x(4), y(4);
        for (int i = 0; i < 4; ++i) {
          x[i] = 6.0 * rng.uniform() - 3.0;
          y[i] = 6.0 * rng.uniform() - 3.0;
        }
        const Vec px = s.project(x);
        CHECK((s.project(px) - px).norm() <= 1e-14);
        CHECK((px - s.project(y)).norm() <= (x - y).norm() + 1e-14);
        CHECK(s.contains(px));
      }
    }
  }

  TEST_CASE("rng: identical keys reproduce identical streams") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
      const auto x = a.next_u64();
      CHECK(x == b.next_u64());
      differs = differs || x != c.next_u64();
    }
    CHECK(differs);
  }

  TEST_CASE("rng: split depends only on the parent key") {
    RngStream a(5, 1);
    const RngStream fresh = a.split(3);
    for (int i = 0; i < 10; ++i) a.next_u64();
    RngStream later = a.split(3);
    RngStream f2 = fresh;
    for (int i = 0; i < 100; ++i) CHECK(f2.next_u64() == later.next_u64());
  }

  TEST_CASE("rng: uniforms lie in their ranges and normals are standard") {
    RngStream rng(3);
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform();
      CHECK((u >= 0.0 && u < 1.0));
      const double w = rng.uniform_open_zero();
      CHECK((w > 0.0 && w <= 1.0));
    }
    const int n = 100000;
    const Moments m = moments(n, [&] { return rng.normal(); });
    CHECK(std::abs(m.mean) <= 4.0 * m.se);
    const Moments m2 = moments(n, [&] {
      const double z = rng.normal();
      return z * z;
    });
    CHECK(std::abs(m2.mean - 1.0) <= 4.0 * m2.se);
  }

  TEST_CASE("sample_unit_sphere: d=1 gives both signs") {
    RngStream rng(1);
    int plus = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const Vec u = sample_unit_sphere(1, rng);
      CHECK(std::abs(u[0]) == 1.0);
      plus += u[0] > 0;
    }
    // Binomial(n, 1/2): 4 standard deviations is 200.
    CHECK(std::abs(plus - n / 2) <= 200);
  }

  TEST_CASE("sample_unit_sphere: unit norm, mean 0 and second moment 1/d") {
    RngStream rng(2);
    const int n = 100000;
    std::vector<Vec> us;
    us.reserve(n);
    for (int i = 0; i < n; ++i) {
      us.push_back(sample_unit_sphere(3, rng));
      CHECK(std::abs(us.back().norm() - 1.0) <= 1e-12);
    }
    int i = 0;
    const Moments m1 = moments(n, [&] { return us[i++][0]; });
    CHECK(std::abs(m1.mean) <= 4.0 * m1.se);
    i = 0;
    const Moments m2 = moments(n, [&] {
      const double v = us[i++][0];
      return v * v;
    });
    CHECK(std::abs(m2.mean - 1.0 / 3.0) <= 4.0 * m2.se);
    // (1/n) sum u u^T against I/d; each entry has standard deviation at most 1/sqrt(n).
    Mat S = Mat::Zero(3, 3);
    for (const auto& u : us) S += u * u.transpose();
    S /= n;
    const double dev = (S - Mat::Identity(3, 3) / 3.0).cwiseAbs().maxCoeff();
    CHECK(dev <= 5.0 / std::sqrt(static_cast<double>(n)));
  }

  TEST_CASE("sample_unit_sphere rejects d < 1") {
    RngStream rng(0);
    CHECK_THROWS_AS(sample_unit_sphere(0, rng), std::invalid_argument);
  }

  TEST_CASE("sample_unit_ball: symmetric, E||u|| = d/(d+1), inside the ball") {
    RngStream rng(4);
    const int n = 100000;
    const Moments m = moments(n, [&] { return sample_unit_ball(1, rng)[0]; });
    CHECK(std::abs(m.mean) <= 4.0 * m.se);
    const Moments r = moments(n, [&] { return sample_unit_ball(2, rng).norm(); });
    CHECK(std::abs(r.mean - 2.0 / 3.0) <= 4.0 * r.se);
    int inside = 0;
    for (int i = 0; i < n; ++i) inside += sample_unit_ball(10, rng).norm() <= 1.0;
    CHECK(inside == n);
  }

  TEST_CASE("sample_segment") {
    RngStream rng(5);
    CHECK(sample_segment(v2(1, 1), v2(1, 1), rng) == v2(1, 1));
    const int n = 100000;
    const Moments m = moments(n, [&] { return sample_segment(v2(0, 0), v2(1, 0), rng)[0]; });
    CHECK(std::abs(m.mean - 0.5) <= 4.0 * m.se);
    for (int i = 0; i < 1000; ++i) CHECK(sample_segment(v2(0, 0), v2(2, 0), rng)[1] == 0.0);
    CHECK_THROWS_AS(sample_segment(v2(0, 0), Vec::Zero(3), rng), DimensionError);
  }

  TEST_CASE("counting oracle tallies queries and points outside the unit ball") {
    LambdaOracle f(
        2, [](const Vec& x) { return x.squaredNorm(); }, [](const Vec& x) { return Vec(2.0 * x); });
    CountingOracle c(f);
    c.eval(v2(0.1, 0.1));
    c.value(v2(2.0, 0.0));
    c.subgradient(v2(0.0, 1.0));
    const CallCounts cc = c.counts();
    CHECK(cc.first_order == 2);
    CHECK(cc.value_only == 1);
    CHECK(cc.outside_unit_ball == 1);
    CHECK(cc.total() == 3);
    c.reset();
    CHECK(c.counts().total() == 0);
  }

  TEST_CASE("parallel_for covers every index once and rethrows") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, 4, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(1000, 4,
                                 [](std::size_t i) {
                                   if (i == 500) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
  }
}
