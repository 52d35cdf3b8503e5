#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace bvg {

/// Dense real vector. Dimension is fixed per problem instance.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when two vectors (or a vector and a problem) disagree on dimension.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_same_dim(const Vec& a, const Vec& b, const char* where) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(where) + ": dimension mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
  }
}

inline void require_dim(const Vec& a, Eigen::Index d, const char* where) {
  if (a.size() != d) {
    throw DimensionError(std::string(where) + ": expected dimension " + std::to_string(d) + ", got " +
                         std::to_string(a.size()));
  }
}

inline bool all_finite(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) return false;
  }
  return true;
}

inline Vec unit_vector(Eigen::Index d, Eigen::Index i) {
  Vec e = Vec::Zero(d);
  e[i] = 1.0;
  return e;
}

}  // namespace bvg
