#include "bvg/analysis.hpp"
#include "bvg/testbed.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace bvg;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("estimate_bvg_max: quadratic approaches r from below") {
    const auto f = make_smooth_quadratic(3, 1.0);
    const auto rep = estimate_bvg_max(f.f(), Vec::Zero(3), 1.0, 0.5, 20000, RngStream(1));
    CHECK(rep.lhat_estimate <= 0.5 + 1e-12);
    CHECK(rep.lhat_estimate >= 0.45);
    CHECK(rep.pairs_sampled == 20000);
  }

  TEST_CASE("estimate_bvg_max: staircase K=4 at r=1") {
    const auto f = make_staircase(2, 4);
    // Ball of radius 1.5 around (0.5, 0) covers [-1, 2] x {0}.
    const auto rep = estimate_bvg_max(f.f(), vec({0.5, 0.0}), 1.5, 1.0, 100000, RngStream(2));
    CHECK(rep.lhat_estimate >= 0.9);
    CHECK(rep.lhat_estimate <= 1.0);
  }

  TEST_CASE("estimate_bvg_max: constant gives 0, nested runs are monotone") {
    CHECK(estimate_bvg_max(make_constant(2, 1.0).f(), Vec::Zero(2), 1.0, 1.0, 1000, RngStream(3)).lhat_estimate ==
          0.0);
    const auto f = make_linf_norm(4);
    double prev = 0.0;
    for (const std::int64_t n : {10, 100, 1000, 10000}) {
      const double est = estimate_bvg_max(f.f(), Vec::Zero(4), 1.0, 0.3, n, RngStream(4)).lhat_estimate;
      CHECK(est >= prev);
      prev = est;
    }
  }

  TEST_CASE("estimate_bvg_max never exceeds the tabulated constant") {
    for (const auto& f : {make_staircase(3, 4), make_shifted_abs(5, 1.0), make_quadratic_growth(3),
                          make_linf_norm(4), make_abs_first(2)}) {
      CAPTURE(f.name);
      for (const double r : {0.125, 0.5, 1.0}) {
        const auto rep = estimate_bvg_max(f.f(), Vec::Zero(f.dim()), 1.5, r, 20000, RngStream(5));
        CHECK(rep.lhat_estimate <= *f.lhat(r) + 1e-9);
        if (f.lipschitz_M) CHECK(rep.lhat_estimate <= 2.0 * *f.lipschitz_M + 1e-9);
      }
    }
  }

  TEST_CASE("estimate_bvg_avg: linear gives 0") {
    const auto rep = estimate_bvg_avg(make_linear(vec({1.0, 2.0})).f(), {Vec::Zero(2), Vec::Ones(2)}, 1.0, 3, 500,
                                      RngStream(6));
    CHECK(rep.lavg_estimate == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    REQUIRE(rep.rho_grid.size() == 3);
    CHECK(rep.rho_grid[2] == 0.25);
  }

  TEST_CASE("estimate_bvg_avg: shifted_abs in high dimension is tiny") {
    const double c = 5.0;
    const auto f = make_shifted_abs(101, c);
    const auto rep = estimate_bvg_avg(f.f(), {Vec::Zero(101)}, 1.0, 4, 20000, RngStream(7));
    CHECK(rep.lavg_estimate <= (2.0 / c) * std::exp(-c * c / 2.0) + 4.0 * rep.lavg_stderr);
  }

  TEST_CASE("estimate_bvg_avg below the max estimate on staircase") {
    const auto f = make_staircase(2, 2);
    const Vec x = vec({0.5, 0.0});
    const auto avg = estimate_bvg_avg(f.f(), {x}, 1.0, 4, 5000, RngStream(8));
    const auto mx = estimate_bvg_max(f.f(), x, 0.0, 1.0, 20000, RngStream(9));
    CHECK(avg.lavg_estimate < mx.lhat_estimate);
  }

  TEST_CASE("L_r estimate stays below L-hat at 2r") {
    RngStream pts(10);
    for (const auto& f : {make_staircase(3, 4), make_shifted_abs(5, 1.0), make_linf_norm(3)}) {
      CAPTURE(f.name);
      std::vector<Vec> points;
      for (int i = 0; i < 5; ++i) {
        Vec x(f.dim());
        for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = 2.0 * pts.uniform() - 1.0;
        points.push_back(x);
      }
      for (const double r : {0.25, 0.5}) {
        const auto avg = estimate_bvg_avg(f.f(), points, r, 4, 2000, RngStream(11));
        const auto mx = estimate_bvg_max(f.f(), Vec::Zero(f.dim()), 2.0, 2.0 * r, 20000, RngStream(12));
        CHECK(avg.lavg_estimate <= mx.lhat_estimate + 4.0 * avg.lavg_stderr);
      }
    }
  }

  TEST_CASE("mean width: singleton, named bodies, segment") {
    CHECK(mean_width_mc({vec({1.0, 2.0, 3.0})}, 1000, RngStream(13)).width == 0.0);
    CHECK(mean_width_named("unit-ball", 7).width == 1.0);
    CHECK(mean_width_named("origin", 7).width == 0.0);
    CHECK_THROWS_AS(mean_width_named("simplex", 3), std::invalid_argument);
    const auto seg = mean_width_mc({vec({-1.0, 0.0, 0.0}), vec({1.0, 0.0, 0.0})}, 100000, RngStream(14));
    CHECK(std::abs(seg.width - 1.0) <= 4.0 * seg.std_error);
    CHECK_THROWS_AS(mean_width_mc({}, 10, RngStream(0)), std::invalid_argument);
  }

  TEST_CASE("mean width of the cube [-1,1]^3 from its vertices") {
    // Support spread of the cube along u is 2 sum |u_i|; E|u_i| = 1/2 in d = 3.
    std::vector<Vec> verts;
    for (int m = 0; m < 8; ++m) verts.push_back(vec({m & 1 ? 1.0 : -1.0, m & 2 ? 1.0 : -1.0, m & 4 ? 1.0 : -1.0}));
    const auto w = mean_width_mc(verts, 100000, RngStream(15));
    CHECK(std::abs(w.width - 3.0) <= 4.0 * w.std_error);
  }

  TEST_CASE("sample_goldstein_cloud") {
    const Vec c = vec({1.0, -1.0, 2.0});
    const auto lin = sample_goldstein_cloud(make_linear(c).f(), Vec::Zero(3), 1.0, 50, RngStream(16));
    CHECK(lin.size() == 50);
    for (const auto& g : lin) CHECK(g == c);
    CHECK(mean_width_mc(lin, 1000, RngStream(17)).width == 0.0);

    const auto abs_cloud = sample_goldstein_cloud(make_abs_first(3).f(), Vec::Zero(3), 1.0, 2000, RngStream(18));
    for (const auto& g : abs_cloud) CHECK((g == unit_vector(3, 0) || g == -unit_vector(3, 0)));
    const auto w = mean_width_mc(abs_cloud, 100000, RngStream(19));
    CHECK(std::abs(w.width - 1.0) <= 4.0 * w.std_error);

    const auto st = sample_goldstein_cloud(make_staircase(2, 4).f(), vec({0.5, 0.0}), 1.0, 2000, RngStream(20));
    for (const auto& g : st) {
      CHECK(g[1] == 0.0);
      CHECK(std::abs(g[0] * 4.0 - std::round(g[0] * 4.0)) <= 1e-15);
      CHECK((g[0] >= 0.0 && g[0] <= 1.0));
    }
  }

  TEST_CASE("choose_radius") {
    auto c = choose_radius(RadiusRule::Avg, 0.5, {{1.0, 0.1}});
    CHECK(c.r == 1.0);
    CHECK(!c.fallback);
    c = choose_radius(RadiusRule::Avg, 0.5, {{1.0, 2.0}});
    CHECK(c.fallback);
    CHECK(c.r == 1.0);
    c = choose_radius(RadiusRule::Avg, 0.5, {{0.1, 1.0}, {0.2, 1.0}, {0.4, 1.0}});
    CHECK(c.r == 0.2);
    c = choose_radius(RadiusRule::Width, 0.1, {{1.0, 1.0}}, std::exp(1.0));
    CHECK(c.r == doctest::Approx(0.1 * std::sqrt(std::exp(1.0))).epsilon(1e-12));
    CHECK_THROWS_AS(choose_radius(RadiusRule::Avg, 0.5, {}), std::invalid_argument);
  }

  TEST_CASE("check_upper_quadratic: linear and undersized constants") {
    RngStream rng(21);
    const auto pairs = random_pairs_in_box(2, -2.0, 3.0, 10000, rng);
    const auto lin = check_upper_quadratic(make_linear(vec({1.0, 3.0})).f(), pairs, 1.0, 0.0);
    CHECK(lin.violations == 0);
    const auto st = make_staircase(2, 2);
    const auto bad = check_upper_quadratic(st.f(), pairs, 1.0, 0.01);
    CHECK(bad.violations > 0);
    CHECK(bad.worst_margin < 0.0);
  }

  TEST_CASE("stated upper-quadratic bound fails across a kink beyond r") {
    // |x1| with r = 1, x1 = -0.01, y1 = 1.5: lhs = 3.0 but (L-hat / 2r) D^2 = 2.2801.
    const auto f = make_abs_first(2);
    const std::vector<PointPair> pair{{vec({-0.01, 0.0}), vec({1.5, 0.0})}};
    CHECK(check_upper_quadratic(f.f(), pair, 1.0, 2.0, BoundForm::Stated).violations == 1);
    CHECK(check_upper_quadratic(f.f(), pair, 1.0, 2.0, BoundForm::Corrected).violations == 0);
    // Two-piece staircase at r = 1: x1 = 0, y1 = 1.01.
    const auto st = make_staircase(2, 2);
    const std::vector<PointPair> p2{{vec({0.0, 0.0}), vec({1.01, 0.0})}};
    CHECK(check_upper_quadratic(st.f(), p2, 1.0, 1.0, BoundForm::Stated).violations == 1);
    CHECK(check_upper_quadratic(st.f(), p2, 1.0, 1.0, BoundForm::Corrected).violations == 0);
  }

  TEST_CASE("corrected bounds hold on random pairs for the catalog") {
    RngStream rng(22);
    for (const auto& f : {make_staircase(2, 2), make_staircase(3, 4), make_shifted_abs(5, 1.0), make_abs_first(2),
                          make_linf_norm(3), make_smooth_quadratic(3, 1.0)}) {
      CAPTURE(f.name);
      const auto pairs = random_pairs_in_box(f.dim(), -2.0, 3.0, 10000, rng);
      for (const double r : {0.25, 1.0}) {
        CHECK(check_upper_quadratic(f.f(), pairs, r, *f.lhat(r), BoundForm::Corrected).violations == 0);
        CHECK(check_interpolation(f.f(), pairs, r, *f.lhat(r), BoundForm::Corrected).violations == 0);
      }
    }
  }

  TEST_CASE("check_interpolation") {
    const auto sq = make_smooth_quadratic(2, 1.0);
    const std::vector<PointPair> near{{Vec::Zero(2), vec({0.1, 0.0})}};
    const auto vac = check_interpolation(sq.f(), near, 1.0, 1.0);
    CHECK(vac.checked == 0);
    CHECK(vac.violations == 0);

    const auto sa = make_shifted_abs(5, 1.0);
    Vec x = Vec::Zero(5), y = Vec::Zero(5);
    x[0] = -2.0;
    y[0] = 2.0;
    const auto cross = check_interpolation(sa.f(), {{x, y}}, 0.1, *sa.lhat(0.1));
    CHECK(cross.checked == 1);
    CHECK(cross.violations == 0);
    // lhs (0.1 / 2) * 4 = 0.2, rhs 0 + 4 = 4.
    CHECK(cross.worst_margin == doctest::Approx(3.8));

    RngStream rng(23);
    const auto pairs = random_pairs_in_box(2, -2.0, 2.0, 5000, rng);
    const auto smooth = check_interpolation(sq.f(), pairs, 0.5, 0.5);
    CHECK(smooth.checked > 0);
    CHECK(smooth.violations == 0);
  }

  TEST_CASE("check_smoothness_fr") {
    SmoothnessCheckConfig cfg;
    cfg.samples = 4000;
    cfg.rng = RngStream(24);
    std::vector<PointPair> pairs;
    for (int i = 0; i < 10; ++i) pairs.push_back({Vec::Zero(3), 0.1 * (i + 1) * unit_vector(3, 0)});
    CHECK(check_smoothness_fr(make_linear(vec({1.0, 2.0, 3.0})).f(), pairs, 1.0, 0.0, 0.0, cfg).violations == 0);
    CHECK(check_smoothness_fr(make_abs_first(3).f(), pairs, 1.0, 2.0, 2.0, cfg).violations == 0);
    CHECK(check_smoothness_fr(make_smooth_quadratic(3, 1.0).f(), pairs, 1.0, 1.0, 1.0, cfg).violations == 0);
    CHECK(smoothness_constant(1.0, 1.0, 1.0, 3.0) == doctest::Approx(std::sqrt(M_PI / 2.0) * std::sqrt(3.0)));
  }

  TEST_CASE("key=value serialization") {
    const auto s = to_key_value(mean_width_named("unit-ball", 3));
    CHECK(s.find("width=1") != std::string::npos);
    CheckResult cr;
    cr.lemma_id = "upper-quadratic";
    CHECK(to_key_value(cr).find("lemma_id=upper-quadratic") != std::string::npos);
  }
}
