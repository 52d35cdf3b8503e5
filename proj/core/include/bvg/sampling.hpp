#pragma once

#include "bvg/rng.hpp"
#include "bvg/vec.hpp"

namespace bvg {

/// Uniform point on the unit sphere in R^d: a normalized standard Gaussian
/// vector (redrawn if it is exactly zero).
Vec sample_unit_sphere(Eigen::Index d, RngStream& rng);

/// Uniform point in the closed unit ball: a sphere sample scaled by U^(1/d),
/// U uniform on (0, 1].
Vec sample_unit_ball(Eigen::Index d, RngStream& rng);

/// Uniform point on the segment [a, b].
Vec sample_segment(const Vec& a, const Vec& b, RngStream& rng);

}  // namespace bvg
