#pragma once

#include "bvg/oracle.hpp"
#include "bvg/vec.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bvg {

struct BvgEntry {
  double r;
  double lhat;
};

/// Catalog oracle plus whatever is known analytically about it.
struct BenchFunction {
  std::shared_ptr<const Oracle> oracle;
  std::string name;
  std::optional<Vec> minimizer;
  std::optional<double> f_star;
  std::optional<double> lipschitz_M;
  /// L-hat_r on the default radius grid (2^-6 .. 2^2).
  std::vector<BvgEntry> bvg_max_table;
  bool convex = true;
  /// Closed-form L-hat_r when known; bvg_max_table is sampled from it.
  std::function<double(double)> lhat_fn;
  /// f_r(x) - f(x) when it does not depend on x.
  std::function<double(double)> smoothing_offset;
  /// Number of affine pieces for max-of-linear functions.
  std::optional<int> vertex_count;

  const Oracle& f() const { return *oracle; }
  Eigen::Index dim() const { return oracle->dim(); }
  /// Analytic L-hat_r, or nullopt when the function has none.
  std::optional<double> lhat(double r) const;
};

/// Radii at which bvg_max_table is populated.
std::vector<double> default_radius_grid();

/// Piecewise-linear staircase in x1 with K unit-fraction slopes between 0 and 1.
BenchFunction make_staircase(int d, int K);
/// K = ceil(sqrt(d / (2 ln 2d))), the choice used for the dimension-dependent
/// lower-bound example.
int staircase_default_K(int d);

/// max(0, |x1| - c / sqrt(d - 1)); the subgradient at the kink is sign(x1) e1.
BenchFunction make_shifted_abs(int d, double c);

/// 0 inside the unit ball, ||x||^2/2 - 1/2 outside. Boundary points use the
/// interior branch (zero gradient).
BenchFunction make_quadratic_growth(int d);

/// max_i (<a_i, x> - b_i); rows of A are the a_i. Ties go to the smallest index.
BenchFunction make_max_of_linear(const Mat& A, const Vec& b);

/// (curvature / 2) ||x||^2.
BenchFunction make_smooth_quadratic(int d, double curvature);

BenchFunction make_linear(const Vec& c);
BenchFunction make_constant(int d, double value);
/// |x1| as a two-piece max of linear functions.
BenchFunction make_abs_first(int d);
/// ||x||_inf as a max of the 2d functions +-x_i.
BenchFunction make_linf_norm(int d);

using ParamValue = std::variant<double, std::vector<double>, std::vector<std::vector<double>>>;
using ParamMap = std::map<std::string, ParamValue>;

struct CatalogEntry {
  std::string name;
  std::string params;
  std::string description;
};

/// Builds a catalog function by name. Throws std::invalid_argument on an
/// unknown name, a missing or unexpected parameter, or a bad value.
BenchFunction make_function(const std::string& name, const ParamMap& params);
std::vector<CatalogEntry> list_functions();

}  // namespace bvg
