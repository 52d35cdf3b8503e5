#include "bvg/harness/subgradient_baseline.hpp"

#include <stdexcept>

namespace bvg::harness {

SubgradientResult run_subgradient(const Oracle& o, const SubgradientOptions& opt) {
  require_dim(opt.x0, o.dim(), "run_subgradient");
  if (!(opt.step > 0.0)) throw std::invalid_argument("run_subgradient: step must be positive");
  if (opt.iters < 1) throw std::invalid_argument("run_subgradient: iters must be >= 1");
  if (!opt.set.contains(opt.x0, 1e-9)) throw std::invalid_argument("run_subgradient: x0 outside the feasible set");

  CountingOracle counted(o);
  SubgradientResult res;
  Vec x = opt.x0;
  res.best_x = x;
  res.best_f = std::numeric_limits<double>::infinity();

  for (std::int64_t k = 0; k < opt.iters; ++k) {
    if (opt.max_oracle_calls > 0 && static_cast<std::int64_t>(counted.counts().total()) >= opt.max_oracle_calls) {
      res.status = RunStatus::BudgetExhausted;
      break;
    }
    const OracleResult at = counted.eval(x);
    ++res.rounds;
    if (at.value < res.best_f) {
      res.best_f = at.value;
      res.best_x = x;
    }
    res.records.push_back({k, at.value, res.best_f, static_cast<std::int64_t>(counted.counts().total())});
    if (opt.f_star && opt.stop_gap && res.best_f - *opt.f_star <= *opt.stop_gap) {
      res.status = RunStatus::TargetReached;
      break;
    }
    x = opt.set.project(x - opt.step * at.subgradient);
  }
  const CallCounts cc = counted.counts();
  res.oracle_calls = static_cast<std::int64_t>(cc.total());
  res.queries_outside_unit_ball = static_cast<std::int64_t>(cc.outside_unit_ball);
  return res;
}

}  // namespace bvg::harness
