#include "bvg/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace bvg {

Vec sample_unit_sphere(Eigen::Index d, RngStream& rng) {
  if (d < 1) throw std::invalid_argument("sample_unit_sphere: d must be >= 1");
  Vec u(d);
  for (;;) {
    for (Eigen::Index i = 0; i < d; ++i) u[i] = rng.normal();
    const double norm = u.norm();
    if (norm > 0.0) {
      u /= norm;
      return u;
    }
  }
}

Vec sample_unit_ball(Eigen::Index d, RngStream& rng) {
  Vec u = sample_unit_sphere(d, rng);
  const double radius = std::pow(rng.uniform_open_zero(), 1.0 / static_cast<double>(d));
  u *= radius;
  return u;
}

Vec sample_segment(const Vec& a, const Vec& b, RngStream& rng) {
  require_same_dim(a, b, "sample_segment");
  const double t = rng.uniform();
  return a + t * (b - a);
}

}  // namespace bvg
