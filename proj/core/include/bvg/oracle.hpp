#pragma once

#include "bvg/vec.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>

namespace bvg {

struct OracleResult {
  double value = 0.0;
  Vec subgradient;
};

/// First-order black box. The subgradient returned at a point must be a
/// deterministic function of that point; implementations must be safe to
/// call concurrently.
class Oracle {
 public:
  virtual ~Oracle() = default;

  virtual Eigen::Index dim() const = 0;
  virtual OracleResult eval(const Vec& x) const = 0;

  /// Zeroth-order query. Defaults to eval(x).value; override when the value
  /// alone is cheaper.
  virtual double value(const Vec& x) const { return eval(x).value; }
  Vec subgradient(const Vec& x) const { return eval(x).subgradient; }
};

/// Oracle assembled from two callables. Handy for tests and one-off objectives.
class LambdaOracle final : public Oracle {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;

  LambdaOracle(Eigen::Index d, ValueFn f, GradFn g);

  Eigen::Index dim() const override { return d_; }
  OracleResult eval(const Vec& x) const override;
  double value(const Vec& x) const override;

 private:
  Eigen::Index d_;
  ValueFn f_;
  GradFn g_;
};

struct CallCounts {
  std::uint64_t first_order = 0;
  std::uint64_t value_only = 0;
  std::uint64_t outside_unit_ball = 0;

  std::uint64_t total() const { return first_order + value_only; }
};

/// Wraps an oracle and counts queries. Thread-safe.
class CountingOracle final : public Oracle {
 public:
  explicit CountingOracle(const Oracle& inner) : inner_(inner) {}

  Eigen::Index dim() const override { return inner_.dim(); }
  OracleResult eval(const Vec& x) const override;
  double value(const Vec& x) const override;

  CallCounts counts() const;
  void reset();

 private:
  void note_point(const Vec& x) const;

  const Oracle& inner_;
  mutable std::atomic<std::uint64_t> first_order_{0};
  mutable std::atomic<std::uint64_t> value_only_{0};
  mutable std::atomic<std::uint64_t> outside_{0};
};

}  // namespace bvg
