#pragma once

#include "bvg/vec.hpp"

#include <string>
#include <variant>

namespace bvg {

struct WholeSpace {};

struct EuclideanBall {
  Vec center;
  double radius;
};

struct AxisBox {
  Vec lower;
  Vec upper;
};

/// Closed convex nonempty set with a single-valued Euclidean projection.
class FeasibleSet {
 public:
  FeasibleSet() : shape_(WholeSpace{}) {}

  static FeasibleSet whole_space() { return FeasibleSet(); }
  static FeasibleSet ball(Vec center, double radius);
  static FeasibleSet box(Vec lower, Vec upper);

  /// Euclidean projection of x onto the set.
  Vec project(const Vec& x) const;
  bool contains(const Vec& x, double tol = 1e-12) const;

  bool is_whole_space() const { return std::holds_alternative<WholeSpace>(shape_); }
  std::string describe() const;

  const std::variant<WholeSpace, EuclideanBall, AxisBox>& shape() const { return shape_; }

 private:
  explicit FeasibleSet(std::variant<WholeSpace, EuclideanBall, AxisBox> s) : shape_(std::move(s)) {}
  std::variant<WholeSpace, EuclideanBall, AxisBox> shape_;
};

inline Vec project(const FeasibleSet& set, const Vec& x) { return set.project(x); }

}  // namespace bvg
