#include "bvg/oracle.hpp"

#include <stdexcept>

namespace bvg {

LambdaOracle::LambdaOracle(Eigen::Index d, ValueFn f, GradFn g)
    : d_(d), f_(std::move(f)), g_(std::move(g)) {
  if (d < 1) throw std::invalid_argument("LambdaOracle: dimension must be >= 1");
  if (!f_ || !g_) throw std::invalid_argument("LambdaOracle: empty callable");
}

OracleResult LambdaOracle::eval(const Vec& x) const {
  require_dim(x, d_, "LambdaOracle::eval");
  return {f_(x), g_(x)};
}

double LambdaOracle::value(const Vec& x) const {
  require_dim(x, d_, "LambdaOracle::value");
  return f_(x);
}

void CountingOracle::note_point(const Vec& x) const {
  if (x.squaredNorm() > 1.0) outside_.fetch_add(1, std::memory_order_relaxed);
}

OracleResult CountingOracle::eval(const Vec& x) const {
  first_order_.fetch_add(1, std::memory_order_relaxed);
  note_point(x);
  return inner_.eval(x);
}

double CountingOracle::value(const Vec& x) const {
  value_only_.fetch_add(1, std::memory_order_relaxed);
  note_point(x);
  return inner_.value(x);
}

CallCounts CountingOracle::counts() const {
  CallCounts c;
  c.first_order = first_order_.load();
  c.value_only = value_only_.load();
  c.outside_unit_ball = outside_.load();
  return c;
}

void CountingOracle::reset() {
  first_order_ = 0;
  value_only_ = 0;
  outside_ = 0;
}

}  // namespace bvg
