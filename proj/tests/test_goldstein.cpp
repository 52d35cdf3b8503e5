#include "bvg/goldstein.hpp"
#include "bvg/testbed.hpp"

#include <doctest.h>

#include <cmath>

using namespace bvg;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

IngdConfig config(double delta, double eps, double M, double lhat, std::uint64_t seed) {
  IngdConfig c;
  c.delta = delta;
  c.eps = eps;
  c.M = M;
  c.lhat = lhat;
  c.rng = RngStream(seed);
  return c;
}

}  // namespace

TEST_SUITE("goldstein") {
  TEST_CASE("perturbation_exponent") {
    CHECK(perturbation_exponent(1.0, 0.1) == 7);
    CHECK(perturbation_exponent(1.0, 100.0) == 1);
    CHECK(perturbation_exponent(3.0, 0.01) == 12);
  }

  TEST_CASE("descent_test on |x|") {
    const auto f = make_abs_first(1);
    const auto hit = descent_test(f.f(), vec({1.0}), 1.0, vec({1.0}), 0.5);
    CHECK(hit.descent);
    CHECK(hit.f_trial == doctest::Approx(0.5));
    CHECK_FALSE(descent_test(f.f(), vec({0.1}), vec({1.0}), 0.5));
    CHECK_THROWS_AS(descent_test(f.f(), vec({1.0}), 1.0, vec({0.0}), 0.5), std::invalid_argument);
  }

  TEST_CASE("inner_update step weight") {
    const auto f = make_abs_first(2);
    RngStream rng(3);
    auto c = config(0.5, 0.1, 1.0, 1.0, 3);
    const auto u1 = inner_update(f.f(), vec({0.2, 0.0}), vec({1.0, 0.0}), c, 7, rng);
    CHECK(u1.lambda == doctest::Approx(1.0 / 3.0));
    const auto u2 = inner_update(f.f(), vec({0.2, 0.0}), vec({2.0, 0.0}), c, 7, rng);
    CHECK(u2.lambda == 1.0);
    CHECK((u1.y - vec({0.2, 0.0})).norm() <= 0.5 + 1e-12);
  }

  TEST_CASE("accept_candidate") {
    const Vec g = vec({1.0, 0.0});
    CHECK(accept_candidate(g, vec({0.97, 0.0}), 1.0));
    CHECK_FALSE(accept_candidate(g, vec({0.98, 0.0}), 1.0));
    CHECK(accept_candidate(g, vec({0.86, 0.0}), 0.1));
    CHECK_FALSE(accept_candidate(g, vec({0.87, 0.0}), 0.1));
    RngStream rng(11);
    for (int t = 0; t < 10000; ++t) {
      const Vec a = Vec::Random(3), b = Vec::Random(3);
      const double lhat = 0.1 + rng.uniform();
      if (accept_candidate(a, b, lhat)) CHECK(b.norm() < a.norm());
    }
  }

  TEST_CASE("run_ingd on |x1| returns a valid certificate") {
    const auto f = make_abs_first(2);
    const auto c = config(0.25, 0.1, 1.0, 2.0, 1);
    const auto cert = run_ingd(f.f(), vec({1.0, 0.0}), c);
    REQUIRE(cert.success);
    CHECK(cert.status == "stationary");
    CHECK(cert.g_out.norm() <= 0.1);
    CHECK(std::abs(cert.x_out[0]) <= 0.25);
    const auto chk = validate_certificate(f.f(), cert, 0.25, 0.1);
    CHECK(chk.valid);
    CHECK(chk.weight_sum == doctest::Approx(1.0));
    CHECK(cert.descent_steps <= ingd_descent_cap(1.0, 0.1, 0.25));
    CHECK(static_cast<double>(cert.total_oracle_calls) <= ingd_query_bound(1.0, 2.0, 0.1, 0.25, 0.1));
  }

  TEST_CASE("validator rejects tampered certificates") {
    const auto f = make_abs_first(2);
    const auto c = config(0.25, 0.1, 1.0, 2.0, 2);
    const auto cert = run_ingd(f.f(), vec({1.0, 0.0}), c);
    REQUIRE(validate_certificate(f.f(), cert, 0.25, 0.1).valid);
    REQUIRE(!cert.witness.empty());

    auto moved = cert;
    moved.witness[0].point = cert.x_out + Vec::Constant(2, 0.3);
    CHECK_FALSE(validate_certificate(f.f(), moved, 0.25, 0.1).valid);

    auto reweighted = cert;
    reweighted.witness[0].weight += 0.01;
    CHECK_FALSE(validate_certificate(f.f(), reweighted, 0.25, 0.1).valid);

    auto regrad = cert;
    regrad.g_out[1] += 1e-3;
    CHECK_FALSE(validate_certificate(f.f(), regrad, 0.25, 0.1).valid);

    CHECK_FALSE(validate_certificate(f.f(), cert, 0.25, cert.g_out.norm() / 2.0).valid);
  }

  TEST_CASE("constant function stops at x0") {
    const auto f = make_constant(3, 2.0);
    const Vec x0 = vec({0.3, -0.2, 1.0});
    const auto cert = run_ingd(f.f(), x0, config(0.1, 0.1, 1.0, 1.0, 4));
    CHECK(cert.success);
    CHECK(cert.x_out == x0);
    CHECK(cert.descent_steps == 0);
    CHECK(validate_certificate(f.f(), cert, 0.1, 0.1).valid);
  }

  TEST_CASE("quadratic_growth: caps and certificates over seeds") {
    const auto f = make_quadratic_growth(5);
    Vec x0 = Vec::Zero(5);
    x0[0] = 3.0;
    const double delta = 0.1, eps = 0.1;
    const double lhat = *f.lhat(2 * delta);
    const double Delta = f.f().value(x0) - *f.f_star;
    const auto K = ingd_descent_cap(Delta, eps, delta);
    const auto J = ingd_inner_cap(lhat, eps, K, 0.1);
    int valid = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto cert = run_ingd(f.f(), x0, config(delta, eps, 3.0, lhat, s));
      CHECK(cert.descent_steps <= K);
      for (auto len : cert.inner_loop_lengths) CHECK(len <= J);
      if (validate_certificate(f.f(), cert, delta, eps).valid) ++valid;
    }
    CHECK(valid >= 9);
  }

  TEST_CASE("descent only while the gradient is large") {
    const auto f = make_linear(vec({1.0, 0.0}));
    auto c = config(0.1, 0.1, 1.0, 1.0, 5);
    c.max_outer = 25;
    const auto cert = run_ingd(f.f(), vec({0.0, 0.0}), c);
    CHECK_FALSE(cert.success);
    CHECK(cert.status == "outer-cap");
    CHECK(cert.descent_steps == 25);
    CHECK(cert.x_out[0] == doctest::Approx(-2.5));
    CHECK(validate_certificate(f.f(), cert, 0.1, 10.0).valid);
  }

  TEST_CASE("query budget is honoured") {
    const auto f = make_abs_first(2);
    auto c = config(0.25, 1e-6, 1.0, 2.0, 6);
    c.max_queries = 50;
    const auto cert = run_ingd(f.f(), vec({1.0, 0.0}), c);
    CHECK_FALSE(cert.success);
    CHECK(cert.total_oracle_calls <= 50);
  }

  TEST_CASE("deterministic under a fixed seed") {
    const auto f = make_staircase(2, 4);
    const auto a = run_ingd(f.f(), vec({1.2, 0.0}), config(0.2, 0.1, 1.0, 1.0, 9));
    const auto b = run_ingd(f.f(), vec({1.2, 0.0}), config(0.2, 0.1, 1.0, 1.0, 9));
    CHECK(a.x_out == b.x_out);
    CHECK(a.g_out == b.g_out);
    CHECK(a.total_oracle_calls == b.total_oracle_calls);
    CHECK(a.inner_loop_lengths == b.inner_loop_lengths);
  }

  TEST_CASE("caps") {
    CHECK(ingd_descent_cap(1.0, 0.1, 0.1) == 200);
    CHECK(ingd_inner_cap(1.0, 0.1, 200, 0.1) == static_cast<std::int64_t>(std::ceil(1500.0 * std::log(2000.0))));
    CHECK(ingd_query_bound(1.0, 1.0, 0.1, 0.1, 0.1) ==
          doctest::Approx(201.0 * std::ceil(1500.0 * std::log(2000.0))));
  }
}
