#include "bvg/feasible_set.hpp"

#include <sstream>
#include <stdexcept>

namespace bvg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

FeasibleSet FeasibleSet::ball(Vec center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("FeasibleSet::ball: radius must be positive and finite");
  }
  if (!all_finite(center)) throw std::invalid_argument("FeasibleSet::ball: center must be finite");
  return FeasibleSet(EuclideanBall{std::move(center), radius});
}

FeasibleSet FeasibleSet::box(Vec lower, Vec upper) {
  require_same_dim(lower, upper, "FeasibleSet::box");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] <= upper[i])) {
      throw std::invalid_argument("FeasibleSet::box: lower bound exceeds upper bound");
    }
  }
  return FeasibleSet(AxisBox{std::move(lower), std::move(upper)});
}

Vec FeasibleSet::project(const Vec& x) const {
  return std::visit(overloaded{
                        [&](const WholeSpace&) -> Vec { return x; },
                        [&](const EuclideanBall& b) -> Vec {
                          require_same_dim(x, b.center, "project");
                          const Vec offset = x - b.center;
                          const double dist = offset.norm();
                          if (dist <= b.radius) return x;
                          return b.center + offset * (b.radius / dist);
                        },
                        [&](const AxisBox& b) -> Vec {
                          require_same_dim(x, b.lower, "project");
                          return x.cwiseMax(b.lower).cwiseMin(b.upper);
                        },
                    },
                    shape_);
}

bool FeasibleSet::contains(const Vec& x, double tol) const {
  return std::visit(overloaded{
                        [&](const WholeSpace&) { return true; },
                        [&](const EuclideanBall& b) {
                          require_same_dim(x, b.center, "contains");
                          return (x - b.center).norm() <= b.radius * (1.0 + tol) + tol;
                        },
                        [&](const AxisBox& b) {
                          require_same_dim(x, b.lower, "contains");
                          return ((x - b.lower).array() >= -tol).all() &&
                                 ((b.upper - x).array() >= -tol).all();
                        },
                    },
                    shape_);
}

std::string FeasibleSet::describe() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const WholeSpace&) { os << "whole-space"; },
                 [&](const EuclideanBall& b) { os << "ball(radius=" << b.radius << ")"; },
                 [&](const AxisBox&) { os << "box"; },
             },
             shape_);
  return os.str();
}

}  // namespace bvg
