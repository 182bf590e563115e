#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jnlab/check_report.hpp"
#include "jnlab/dyadic_core.hpp"

namespace jnlab {

/// Dyadic maximal function of f on the finest cells of Q0 (lexicographic order relative to Q0).
struct MaximalField {
  DyadicCube q0;
  int levels = 0;
  std::vector<double> values;
  /// Absolute depth of the shallowest ancestor attaining the value.
  std::vector<int> provenance;

  [[nodiscard]] double max_value() const;
};

[[nodiscard]] MaximalField dyadic_maximal(const GridFunction& f, const DyadicCube& q0);
[[nodiscard]] MaximalField dyadic_maximal(const DyadicTree& tree);

/// Cells of Q0 where the field is strictly above lambda.
[[nodiscard]] CellSet level_set(const MaximalField& m, double lambda);
[[nodiscard]] CellSet level_set(const MaximalField& m, double lambda, const DyadicCube& q0);

struct CzCover {
  double level = 0.0;
  std::vector<DyadicCube> cubes;
  std::vector<double> averages;  // average of |f| on each cube
  CellSet residual;
};

/// Thrown when the average of |f| over Q0 exceeds the requested level.
class CzPreconditionError : public std::invalid_argument {
 public:
  CzPreconditionError(double average, double lambda);
  [[nodiscard]] double average() const noexcept { return average_; }
  [[nodiscard]] double lambda() const noexcept { return lambda_; }

 private:
  double average_;
  double lambda_;
};

/// Maximal dyadic subcubes of Q0 with |f|-average > lambda, coarsest first, Morton order.
[[nodiscard]] CzCover cz_decompose_dyadic(const GridFunction& f, const DyadicCube& q0, double lambda);

/// Independent post-check of a cover: disjointness, union = level set, and the three stopping properties.
struct CzPropertyCheck {
  bool disjoint = true;
  bool union_is_level_set = true;
  bool residual_bounded = true;    // |f| <= lambda off the cubes
  bool averages_bracketed = true;  // lambda < avg <= 2^n lambda
  bool weak_type = true;           // |E| <= (1/lambda) int_E |f|
  double level_set_measure = 0.0;
  double weak_type_bound = 0.0;
  std::string first_violation;

  [[nodiscard]] bool ok() const {
    return disjoint && union_is_level_set && residual_bounded && averages_bracketed && weak_type;
  }
};

[[nodiscard]] CzPropertyCheck check_cz_properties(const GridFunction& f, const DyadicCube& q0, const CzCover& cover);

/// |{M(f - f_Q0) > lambda}| <= (aK/lambda) |{M(f - f_Q0) > b lambda}|^{1/q}, a = 1/(1 - 2^n b).
[[nodiscard]] CheckReport check_good_lambda_dyadic(const GridFunction& f, const DyadicCube& q0, double p, double b,
                                                   double lambda, double K);
[[nodiscard]] std::vector<CheckReport> check_good_lambda_dyadic(const GridFunction& f, const DyadicCube& q0, double p,
                                                                double b, std::span<const double> lambdas, double K);

/// Smallest admissible level (1/b) * mean oscillation over Q0.
[[nodiscard]] double good_lambda_threshold(const GridFunction& f, const DyadicCube& q0, double b);

/// Admissible levels where the good-lambda margin can be worst: the threshold, every maximal value and v/b
/// together with the float just below each.
[[nodiscard]] std::vector<double> good_lambda_critical_levels(const GridFunction& f, const DyadicCube& q0, double b);

/// Weak-type bound for f - f_Q0 on a 60-point log sweep, with K from the dyadic JN_p functional.
[[nodiscard]] std::vector<CheckReport> verify_jn_dyadic(const GridFunction& f, const DyadicCube& q0, double p);
/// Same with a caller-supplied K (an upper bound for the dyadic JN_p norm); `k_source` is recorded.
[[nodiscard]] std::vector<CheckReport> verify_jn_dyadic(const GridFunction& f, const DyadicCube& q0, double p,
                                                        double K, const std::string& k_source);

inline constexpr int kSweepPoints = 60;

}  // namespace jnlab
