#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "jnlab/check_report.hpp"
#include "jnlab/constants.hpp"
#include "jnlab/metric_space.hpp"

namespace jnlab {

/// Calderon-Zygmund balls at one level: disjoint B_i centered in B0 with 5B_i inside 11B0.
struct CzBallCover {
  double level = 0.0;
  std::vector<Ball> balls;
  std::vector<double> ball_averages;    // average of f over B_i
  std::vector<double> dilate_averages;  // average of f over 5B_i
  std::vector<std::size_t> seeds;       // the point x with B_i = 5^{n-1} B_x
  std::vector<int> exponents;           // that n
  PointSet residual;                    // B0 outside every 5B_i
  bool degenerate_dilates = false;      // 11B0 and B0 have the same members
};

/// Raised when a constructed cover violates one of its defining properties.
class CzInvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// (1/mu(B0)) * integral of f over 11B0: the smallest admissible level.
[[nodiscard]] double cz_threshold(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0);

/// B_x for each x in B0: the realized ball through x inside B0 with the largest average (ties: smaller radius,
/// then smaller center index), radius capped at 2R without changing its members.
[[nodiscard]] std::vector<std::optional<MaximalWitness>> cz_witness_balls(const MetricMeasureSpace& space,
                                                                          std::span<const double> f, const Ball& b0);

/// Stopping-time construction: for x with a witness average above lambda, the smallest n >= 1 with
/// avg(5^n B_x) <= lambda, then a Vitali selection among the 5^{n-1} B_x. Properties are verified before return.
[[nodiscard]] CzBallCover cz_balls(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0,
                                   double lambda);

/// Empty when the cover has all its properties; otherwise a description of the first violation.
[[nodiscard]] std::string cz_cover_violation(const MetricMeasureSpace& space, std::span<const double> f,
                                             const Ball& b0, const CzBallCover& cover);

struct NestedCovers {
  std::vector<double> levels;
  std::vector<CzBallCover> covers;
  /// containment[n][i] = j with B_i(levels[n+1]) inside 5 B_j(levels[n]).
  std::vector<std::vector<std::size_t>> containment;
};

/// Covers at nondecreasing levels sharing one witness ball per point, with a verified containment map.
[[nodiscard]] NestedCovers nested_cz(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0,
                                     std::span<const double> levels);

/// sum_i mu(5B_i)^{1-p} (integral over 5B_i of |f - f_{5B_i}|)^p over a cover's dilates.
[[nodiscard]] double dilate_family_sum(const MetricMeasureSpace& space, std::span<const double> f,
                                       const CzBallCover& cover, double p);

/// sum_j mu(B_j(2 lambda)) <= (c^{3/q} K / lambda) (sum_i mu(B_i(lambda)))^{1/q} for |f - f_B0|, with
/// K = S^{1/p} from the level-lambda dilates.
[[nodiscard]] CheckReport check_toiterate(const MetricMeasureSpace& space, std::span<const double> f_signed,
                                          const Ball& b0, double lambda, double p);

/// Distribution of |f - f_B0| on B0 against the explicit bound chain, on a 60-point sweep, plus the
/// threshold and good-lambda ladder reports it relies on.
[[nodiscard]] std::vector<CheckReport> verify_mainresult(const MetricMeasureSpace& space, std::span<const double> f,
                                                         const Ball& b0, double p);

/// Right side of the large-level bound for 2^N lambda0 < lambda <= 2^{N+1} lambda0 (normalized K = 1):
/// c^3 c^{3(q^-1 + ... + q^-N)} g(N)^{-1} lambda0^{-(p - p q^-N)} (I / lambda0)^{q^-N}, I = integral over 11B0.
[[nodiscard]] double mainresult_large_bound(const Constants& k, int N, double integral_11b0);

/// Exponential bound c1 mu(B0) exp(-c2 lambda / ||f||) on a sweep, plus halving and level-gap reports.
[[nodiscard]] std::vector<CheckReport> verify_bmo_jn(const MetricMeasureSpace& space, std::span<const double> f,
                                                     const Ball& b0);

}  // namespace jnlab
