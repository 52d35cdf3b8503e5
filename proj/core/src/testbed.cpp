#include "bvg/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace bvg {

namespace {

void require_positive_dim(int d, const char* where) {
  if (d < 1) throw std::invalid_argument(std::string(where) + ": d must be >= 1");
}

class StaircaseOracle final : public Oracle {
 public:
  StaircaseOracle(int d, int K) : d_(d), K_(K) {}
  Eigen::Index dim() const override { return d_; }

  OracleResult eval(const Vec& x) const override {
    require_dim(x, d_, "staircase");
    const int i = piece(x[0]);
    OracleResult res;
    res.value = value_of(i, x[0]);
    res.subgradient = Vec::Zero(d_);
    res.subgradient[0] = static_cast<double>(i) / K_;
    return res;
  }

  double value(const Vec& x) const override {
    require_dim(x, d_, "staircase");
    return value_of(piece(x[0]), x[0]);
  }

 private:
  // Smallest active piece: slope i/K on ((i-1)/K, i/K], 0 for t <= 0, 1 for t > 1.
  int piece(double t) const {
    if (!(t > 0.0)) return 0;
    const double scaled = std::ceil(t * K_);
    return scaled >= K_ ? K_ : static_cast<int>(scaled);
  }
  double value_of(int i, double t) const {
    const double K = K_;
    return (i / K) * t - (static_cast<double>(i - 1) * i) / (2.0 * K * K);
  }

  int d_;
  int K_;
};

class ShiftedAbsOracle final : public Oracle {
 public:
  ShiftedAbsOracle(int d, double tau) : d_(d), tau_(tau) {}
  Eigen::Index dim() const override { return d_; }

  OracleResult eval(const Vec& x) const override {
    require_dim(x, d_, "shifted_abs");
    OracleResult res;
    const double a = std::abs(x[0]);
    res.value = std::max(0.0, a - tau_);
    res.subgradient = Vec::Zero(d_);
    if (a >= tau_) res.subgradient[0] = x[0] >= 0.0 ? 1.0 : -1.0;
    return res;
  }

  double value(const Vec& x) const override {
    require_dim(x, d_, "shifted_abs");
    return std::max(0.0, std::abs(x[0]) - tau_);
  }

 private:
  int d_;
  double tau_;
};

class QuadraticGrowthOracle final : public Oracle {
 public:
  explicit QuadraticGrowthOracle(int d) : d_(d) {}
  Eigen::Index dim() const override { return d_; }

  OracleResult eval(const Vec& x) const override {
    require_dim(x, d_, "quadratic_growth");
    const double sq = x.squaredNorm();
    if (sq <= 1.0) return {0.0, Vec::Zero(d_)};
    return {0.5 * sq - 0.5, x};
  }

  double value(const Vec& x) const override {
    require_dim(x, d_, "quadratic_growth");
    const double sq = x.squaredNorm();
    return sq <= 1.0 ? 0.0 : 0.5 * sq - 0.5;
  }

 private:
  int d_;
};

class MaxOfLinearOracle final : public Oracle {
 public:
  MaxOfLinearOracle(Mat A, Vec b) : A_(std::move(A)), b_(std::move(b)) {}
  Eigen::Index dim() const override { return A_.cols(); }

  OracleResult eval(const Vec& x) const override {
    require_dim(x, A_.cols(), "max_of_linear");
    Eigen::Index best = 0;
    const double v = max_piece(x, &best);
    return {v, A_.row(best).transpose()};
  }

  double value(const Vec& x) const override {
    require_dim(x, A_.cols(), "max_of_linear");
    return max_piece(x, nullptr);
  }

 private:
  double max_piece(const Vec& x, Eigen::Index* arg) const {
    const Vec vals = A_ * x - b_;
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < vals.size(); ++i) {
      if (vals[i] > vals[best]) best = i;
    }
    if (arg) *arg = best;
    return vals[best];
  }

  Mat A_;
  Vec b_;
};

class SmoothQuadraticOracle final : public Oracle {
 public:
  SmoothQuadraticOracle(int d, double c) : d_(d), c_(c) {}
  Eigen::Index dim() const override { return d_; }

  OracleResult eval(const Vec& x) const override {
    require_dim(x, d_, "smooth_quadratic");
    return {0.5 * c_ * x.squaredNorm(), c_ * x};
  }
  double value(const Vec& x) const override {
    require_dim(x, d_, "smooth_quadratic");
    return 0.5 * c_ * x.squaredNorm();
  }

 private:
  int d_;
  double c_;
};

class LinearOracle final : public Oracle {
 public:
  LinearOracle(Vec c, double offset) : c_(std::move(c)), offset_(offset) {}
  Eigen::Index dim() const override { return c_.size(); }

  OracleResult eval(const Vec& x) const override {
    require_dim(x, c_.size(), "linear");
    return {c_.dot(x) + offset_, c_};
  }
  double value(const Vec& x) const override {
    require_dim(x, c_.size(), "linear");
    return c_.dot(x) + offset_;
  }

 private:
  Vec c_;
  double offset_;
};

void fill_table(BenchFunction& bf) {
  bf.bvg_max_table.clear();
  if (!bf.lhat_fn) return;
  for (double r : default_radius_grid()) bf.bvg_max_table.push_back({r, bf.lhat_fn(r)});
}

}  // namespace

std::optional<double> BenchFunction::lhat(double r) const {
  if (!lhat_fn) return std::nullopt;
  return lhat_fn(r);
}

std::vector<double> default_radius_grid() {
  std::vector<double> grid;
  for (int e = -6; e <= 2; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

BenchFunction make_staircase(int d, int K) {
  require_positive_dim(d, "make_staircase");
  if (K < 1) throw std::invalid_argument("make_staircase: K must be >= 1");
  BenchFunction bf;
  bf.oracle = std::make_shared<StaircaseOracle>(d, K);
  bf.name = "staircase";
  bf.minimizer = Vec::Zero(d);
  bf.f_star = 0.0;
  bf.lipschitz_M = 1.0;
  bf.lhat_fn = [K](double r) { return std::min(1.0, std::ceil(r * K) / K); };
  fill_table(bf);
  return bf;
}

int staircase_default_K(int d) {
  require_positive_dim(d, "staircase_default_K");
  const double v = std::sqrt(d / (2.0 * std::log(2.0 * d)));
  return std::max(1, static_cast<int>(std::ceil(v)));
}

BenchFunction make_shifted_abs(int d, double c) {
  if (d < 2) throw std::invalid_argument("make_shifted_abs: d must be >= 2");
  const double root = std::sqrt(static_cast<double>(d - 1));
  if (!(c >= 1.0 && c < root)) {
    throw std::invalid_argument("make_shifted_abs: c must satisfy 1 <= c < sqrt(d-1)");
  }
  const double tau = c / root;
  BenchFunction bf;
  bf.oracle = std::make_shared<ShiftedAbsOracle>(d, tau);
  bf.name = "shifted_abs";
  bf.minimizer = Vec::Zero(d);
  bf.f_star = 0.0;
  bf.lipschitz_M = 1.0;
  bf.lhat_fn = [tau](double r) { return r >= 2.0 * tau ? 2.0 : 1.0; };
  fill_table(bf);
  return bf;
}

BenchFunction make_quadratic_growth(int d) {
  require_positive_dim(d, "make_quadratic_growth");
  BenchFunction bf;
  bf.oracle = std::make_shared<QuadraticGrowthOracle>(d);
  bf.name = "quadratic_growth";
  bf.minimizer = Vec::Zero(d);
  bf.f_star = 0.0;
  // From the zero-gradient boundary point x to (1 + r) x.
  bf.lhat_fn = [](double r) { return 1.0 + r; };
  fill_table(bf);
  return bf;
}

BenchFunction make_max_of_linear(const Mat& A, const Vec& b) {
  if (A.rows() < 1 || A.cols() < 1) throw std::invalid_argument("make_max_of_linear: A must be nonempty");
  if (b.size() != A.rows()) {
    throw DimensionError("make_max_of_linear: b must have one entry per row of A");
  }
  if (!A.allFinite() || !all_finite(b)) throw std::invalid_argument("make_max_of_linear: non-finite input");
  BenchFunction bf;
  bf.oracle = std::make_shared<MaxOfLinearOracle>(A, b);
  bf.name = "max_of_linear";
  bf.vertex_count = static_cast<int>(A.rows());
  double M = 0.0;
  double spread = 0.0;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    M = std::max(M, A.row(i).norm());
    for (Eigen::Index j = i + 1; j < A.rows(); ++j) spread = std::max(spread, (A.row(i) - A.row(j)).norm());
  }
  bf.lipschitz_M = M;
  bf.lhat_fn = [spread](double) { return spread; };
  if (M == 0.0) {
    bf.minimizer = Vec::Zero(A.cols());
    bf.f_star = -b.minCoeff();
  }
  fill_table(bf);
  return bf;
}

BenchFunction make_smooth_quadratic(int d, double curvature) {
  require_positive_dim(d, "make_smooth_quadratic");
  if (!(curvature > 0.0)) throw std::invalid_argument("make_smooth_quadratic: curvature must be positive");
  BenchFunction bf;
  bf.oracle = std::make_shared<SmoothQuadraticOracle>(d, curvature);
  bf.name = "smooth_quadratic";
  bf.minimizer = Vec::Zero(d);
  bf.f_star = 0.0;
  bf.lhat_fn = [curvature](double r) { return curvature * r; };
  const double dd = d;
  bf.smoothing_offset = [curvature, dd](double r) { return curvature * r * r * dd / (2.0 * (dd + 2.0)); };
  fill_table(bf);
  return bf;
}

BenchFunction make_linear(const Vec& c) {
  if (c.size() < 1) throw std::invalid_argument("make_linear: c must be nonempty");
  BenchFunction bf;
  bf.oracle = std::make_shared<LinearOracle>(c, 0.0);
  bf.name = "linear";
  bf.lipschitz_M = c.norm();
  bf.lhat_fn = [](double) { return 0.0; };
  bf.smoothing_offset = [](double) { return 0.0; };
  if (c.isZero(0.0)) {
    bf.minimizer = Vec::Zero(c.size());
    bf.f_star = 0.0;
  }
  fill_table(bf);
  return bf;
}

BenchFunction make_constant(int d, double value) {
  require_positive_dim(d, "make_constant");
  BenchFunction bf;
  bf.oracle = std::make_shared<LinearOracle>(Vec::Zero(d), value);
  bf.name = "constant";
  bf.minimizer = Vec::Zero(d);
  bf.f_star = value;
  bf.lipschitz_M = 0.0;
  bf.lhat_fn = [](double) { return 0.0; };
  bf.smoothing_offset = [](double) { return 0.0; };
  fill_table(bf);
  return bf;
}

BenchFunction make_abs_first(int d) {
  require_positive_dim(d, "make_abs_first");
  Mat A = Mat::Zero(2, d);
  A(0, 0) = 1.0;
  A(1, 0) = -1.0;
  BenchFunction bf = make_max_of_linear(A, Vec::Zero(2));
  bf.name = "abs_first";
  bf.minimizer = Vec::Zero(d);
  bf.f_star = 0.0;
  return bf;
}

BenchFunction make_linf_norm(int d) {
  require_positive_dim(d, "make_linf_norm");
  Mat A(2 * d, d);
  A.topRows(d) = Mat::Identity(d, d);
  A.bottomRows(d) = -Mat::Identity(d, d);
  BenchFunction bf = make_max_of_linear(A, Vec::Zero(2 * d));
  bf.name = "linf_norm";
  bf.minimizer = Vec::Zero(d);
  bf.f_star = 0.0;
  return bf;
}

// ---------------------------------------------------------------------------
// Name-based construction

namespace {

class ParamReader {
 public:
  ParamReader(const std::string& fn, const ParamMap& params) : fn_(fn), params_(params) {}

  double real(const std::string& key) {
    const auto& v = fetch(key);
    if (const double* p = std::get_if<double>(&v)) return *p;
    throw std::invalid_argument(fn_ + ": parameter '" + key + "' must be a number");
  }
  double real_or(const std::string& key, double fallback) {
    return params_.count(key) ? real(key) : fallback;
  }
  int integer(const std::string& key) {
    const double v = real(key);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      throw std::invalid_argument(fn_ + ": parameter '" + key + "' must be an integer");
    }
    return static_cast<int>(v);
  }
  bool has(const std::string& key) const { return params_.count(key) > 0; }
  Vec vector(const std::string& key) {
    const auto& v = fetch(key);
    const auto* p = std::get_if<std::vector<double>>(&v);
    if (!p) throw std::invalid_argument(fn_ + ": parameter '" + key + "' must be a list of numbers");
    return Eigen::Map<const Vec>(p->data(), static_cast<Eigen::Index>(p->size()));
  }
  Mat matrix(const std::string& key) {
    const auto& v = fetch(key);
    const auto* p = std::get_if<std::vector<std::vector<double>>>(&v);
    if (!p || p->empty()) throw std::invalid_argument(fn_ + ": parameter '" + key + "' must be a nonempty matrix");
    const std::size_t cols = p->front().size();
    Mat A(p->size(), cols);
    for (std::size_t i = 0; i < p->size(); ++i) {
      if ((*p)[i].size() != cols) throw std::invalid_argument(fn_ + ": ragged matrix '" + key + "'");
      for (std::size_t j = 0; j < cols; ++j) A(i, j) = (*p)[i][j];
    }
    return A;
  }
  void finish() const {
    for (const auto& [k, _] : params_) {
      if (!used_.count(k)) throw std::invalid_argument(fn_ + ": unknown parameter '" + k + "'");
    }
  }

 private:
  const ParamValue& fetch(const std::string& key) {
    auto it = params_.find(key);
    if (it == params_.end()) throw std::invalid_argument(fn_ + ": missing parameter '" + key + "'");
    used_.insert(key);
    return it->second;
  }

  std::string fn_;
  const ParamMap& params_;
  std::set<std::string> used_;
};

}  // namespace

BenchFunction make_function(const std::string& name, const ParamMap& params) {
  ParamReader p(name, params);
  BenchFunction bf;
  if (name == "staircase") {
    const int d = p.integer("d");
    const int K = p.has("K") ? p.integer("K") : staircase_default_K(d);
    bf = make_staircase(d, K);
  } else if (name == "shifted_abs") {
    const int d = p.integer("d");
    bf = make_shifted_abs(d, p.real("c"));
  } else if (name == "quadratic_growth") {
    bf = make_quadratic_growth(p.integer("d"));
  } else if (name == "max_of_linear") {
    const Mat A = p.matrix("A");
    const Vec b = p.has("b") ? p.vector("b") : Vec::Zero(A.rows());
    bf = make_max_of_linear(A, b);
  } else if (name == "smooth_quadratic") {
    const int d = p.integer("d");
    bf = make_smooth_quadratic(d, p.real_or("curvature", 1.0));
  } else if (name == "linear") {
    bf = make_linear(p.vector("c"));
  } else if (name == "constant") {
    const int d = p.integer("d");
    bf = make_constant(d, p.real("value"));
  } else if (name == "abs_first") {
    bf = make_abs_first(p.integer("d"));
  } else if (name == "linf_norm") {
    bf = make_linf_norm(p.integer("d"));
  } else {
    throw std::invalid_argument("unknown function '" + name + "'");
  }
  p.finish();
  return bf;
}

std::vector<CatalogEntry> list_functions() {
  return {
      {"staircase", "d, K (optional)", "convex staircase in x1 with K slopes in [0, 1]"},
      {"shifted_abs", "d, c", "max(0, |x1| - c/sqrt(d-1))"},
      {"quadratic_growth", "d", "0 on the unit ball, ||x||^2/2 - 1/2 outside"},
      {"max_of_linear", "A, b (optional)", "max_i <a_i, x> - b_i"},
      {"smooth_quadratic", "d, curvature (optional)", "(curvature/2) ||x||^2"},
      {"linear", "c", "<c, x>"},
      {"constant", "d, value", "constant function"},
      {"abs_first", "d", "|x1|"},
      {"linf_norm", "d", "max_i |x_i|"},
  };
}

}  // namespace bvg
