#pragma once

// Internal Monte Carlo plumbing shared by the estimators.

#include "bvg/parallel.hpp"
#include "bvg/rng.hpp"
#include "bvg/vec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace bvg::detail {

inline constexpr std::int64_t kBlock = 256;

// Welford accumulator, componentwise over vectors.
struct VecMoments {
  std::int64_t n = 0;
  Vec mean;
  Vec m2;

  explicit VecMoments(Eigen::Index d = 0) : mean(Vec::Zero(d)), m2(Vec::Zero(d)) {}

  void add(const Vec& v) {
    ++n;
    const Vec delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta.cwiseProduct(v - mean);
  }

  // Chan et al. pairwise merge.
  void merge(const VecMoments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
    const Vec delta = o.mean - mean;
    mean += delta * (nb / nt);
    m2 += o.m2 + delta.cwiseProduct(delta) * (na * nb / nt);
    n += o.n;
  }
};

struct ScalarMoments {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  void merge(const ScalarMoments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
    const double delta = o.mean - mean;
    mean += delta * (nb / nt);
    m2 += o.m2 + delta * delta * (na * nb / nt);
    n += o.n;
  }
  double std_error() const {
    if (n < 2) return std::numeric_limits<double>::infinity();
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

struct MaxAccumulator {
  std::int64_t n = 0;
  double max = 0.0;
  void add(double v) {
    max = (n == 0) ? v : std::max(max, v);
    ++n;
  }
  void merge(const MaxAccumulator& o) {
    if (o.n == 0) return;
    max = (n == 0) ? o.max : std::max(max, o.max);
    n += o.n;
  }
};

// Runs `count` draws split into blocks of kBlock; block b owns stream
// rng.split(b). Per-block accumulators are merged in block order, so the
// result does not depend on the thread count.
template <class Acc, class Draw>
Acc block_reduce(std::int64_t count, const RngStream& rng, unsigned threads, const Acc& init, Draw draw) {
  const std::int64_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<Acc> partial(static_cast<std::size_t>(blocks), init);
  parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
    RngStream stream = rng.split(b);
    const std::int64_t begin = static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t end = std::min(count, begin + kBlock);
    for (std::int64_t i = begin; i < end; ++i) partial[b].add(draw(stream));
  });
  Acc total = init;
  for (const auto& p : partial) total.merge(p);
  return total;
}

}  // namespace bvg::detail
