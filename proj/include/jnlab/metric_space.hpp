#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace jnlab {

/// Fixed-size bitset over point indices.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  [[nodiscard]] bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  [[nodiscard]] bool intersects(const PointSet& o) const;
  [[nodiscard]] bool subset_of(const PointSet& o) const;
  [[nodiscard]] std::size_t count() const;
  [[nodiscard]] std::optional<std::size_t> first_common(const PointSet& o) const;
  PointSet& operator|=(const PointSet& o);
  bool operator==(const PointSet&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Open ball {y : d(y, center) < radius}.
struct Ball {
  std::size_t center = 0;
  double radius = 1.0;

  [[nodiscard]] Ball dilate(double factor) const { return Ball{center, radius * factor}; }
  bool operator==(const Ball&) const = default;
};

/// Finite metric measure space with validated metric and positive weights.
class MetricMeasureSpace {
 public:
  /// `metric` is m*m row-major; `points` may be empty when only distances are known.
  MetricMeasureSpace(std::vector<std::vector<double>> points, std::vector<double> metric, std::vector<double> weights);

  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] double distance(std::size_t i, std::size_t j) const { return metric_[i * size() + j]; }
  [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] const std::vector<std::vector<double>>& points() const noexcept { return points_; }
  [[nodiscard]] std::span<const double> metric() const noexcept { return metric_; }
  [[nodiscard]] double total_measure() const noexcept { return total_; }
  [[nodiscard]] double diameter() const noexcept { return diameter_; }
  [[nodiscard]] double doubling_constant() const noexcept { return doubling_; }

  /// Points ordered by (distance from c, index).
  [[nodiscard]] std::span<const std::size_t> neighbors(std::size_t c) const;
  /// Distinct distances from c in increasing order; the first is 0.
  [[nodiscard]] std::span<const double> shells(std::size_t c) const;
  /// Number of points with d(c, .) <= shells(c)[k].
  [[nodiscard]] std::size_t shell_end(std::size_t c, std::size_t k) const;
  /// Shell index of y as seen from c.
  [[nodiscard]] std::size_t shell_of(std::size_t c, std::size_t y) const { return shell_index_[c * size() + y]; }
  /// Number of points with d(c, .) < r.
  [[nodiscard]] std::size_t count_within(std::size_t c, double r) const;
  /// Radii at which B(c, .) realizes each distinct member set: midpoints, then diameter + 1.
  [[nodiscard]] std::vector<double> critical_radii(std::size_t c) const;

  [[nodiscard]] std::vector<std::size_t> members(const Ball& b) const;
  [[nodiscard]] PointSet member_set(const Ball& b) const;
  [[nodiscard]] double measure(const Ball& b) const;
  [[nodiscard]] double measure(const PointSet& s) const;
  [[nodiscard]] bool contains(const Ball& b, std::size_t y) const { return distance(b.center, y) < b.radius; }

  /// Weighted average of f over the ball (members summed in index order).
  [[nodiscard]] double average(std::span<const double> f, const Ball& b) const;
  /// Weighted average of |f - f_B| over the ball.
  [[nodiscard]] double mean_oscillation(std::span<const double> f, const Ball& b) const;
  /// integral of f over a point set.
  [[nodiscard]] double integral(std::span<const double> f, const PointSet& s) const;

 private:
  std::vector<std::vector<double>> points_;
  std::vector<double> metric_;
  std::vector<double> weights_;
  double total_ = 0.0;
  double diameter_ = 0.0;
  double doubling_ = 1.0;
  std::vector<std::size_t> order_;        // m*m neighbour orders
  std::vector<std::size_t> shell_index_;  // m*m
  std::vector<std::vector<double>> shells_;
  std::vector<std::vector<std::size_t>> shell_end_;
};

/// Validates the metric axioms (naming a witness triple on failure) and computes the doubling constant.
[[nodiscard]] MetricMeasureSpace build_space(std::vector<std::vector<double>> points, std::vector<double> metric,
                                             std::vector<double> weights);
/// Euclidean distances between the given coordinates.
[[nodiscard]] MetricMeasureSpace build_euclidean_space(std::vector<std::vector<double>> points,
                                                       std::vector<double> weights);

/// Sup over all balls of mu(2B)/mu(B). For a center c with distinct distances d_0 < ... < d_K the member set
/// {d <= d_k} persists for radii in (d_k, d_{k+1}] and its double is largest at r = d_{k+1}.
[[nodiscard]] double doubling_constant(const MetricMeasureSpace& space);

/// Every (center, critical radius) pair, lexicographic by (center, radius).
[[nodiscard]] std::vector<Ball> realized_balls(const MetricMeasureSpace& space);

struct VitaliResult {
  std::vector<std::size_t> kept;         // input indices in selection order
  std::vector<std::size_t> absorbed_by;  // per input: the kept ball that blocked it (itself when kept)
};

/// Greedy disjoint selection by non-increasing radius (ties by input index). The postcondition
/// (kept balls pairwise disjoint, inputs covered by kept 5-dilates) is verified; std::logic_error if it fails.
[[nodiscard]] VitaliResult vitali_select(const MetricMeasureSpace& space, std::span<const Ball> balls);
[[nodiscard]] std::vector<std::size_t> vitali_subcover(const MetricMeasureSpace& space, std::span<const Ball> balls);

/// Ball attaining the restricted maximal function at a point, with its average.
struct MaximalWitness {
  double value = 0.0;
  Ball ball;
};

/// Per point of B0: the realized ball B with x in B, B inside B0 and the largest average of f
/// (ties: smaller radius, then smaller center index). Empty outside B0.
[[nodiscard]] std::vector<std::optional<MaximalWitness>> restricted_maximal_witnesses(const MetricMeasureSpace& space,
                                                                                      std::span<const double> f,
                                                                                      const Ball& b0);

/// Per point: sup of the average of f over realized balls B with x in B and B inside B0. NaN outside B0.
[[nodiscard]] std::vector<double> hl_maximal_restricted(const MetricMeasureSpace& space, std::span<const double> f,
                                                        const Ball& b0);
/// Per point: sup of the average of |f| over all realized balls containing x.
[[nodiscard]] std::vector<double> global_maximal(const MetricMeasureSpace& space, std::span<const double> f);

/// ||Mf||_p / ||f||_p with the space's weights; 0 when f vanishes.
[[nodiscard]] double strong_type_ratio(const MetricMeasureSpace& space, std::span<const double> f, double p);

/// Balls tagged with the admissibility conditions: (a) centers in B0, (b) inside 11B0, (c) 1/5-dilates disjoint.
struct BallFamily {
  std::vector<Ball> balls;
  bool centered = true;
  bool contained = true;
  bool fifths_disjoint = true;
  bool admissible = true;
  bool ambient_truncated = false;  // 11B0 reaches past the space
  std::vector<std::size_t> uncentered;
  std::vector<std::size_t> uncontained;
  std::optional<std::pair<std::size_t, std::size_t>> overlap_pair;
  std::optional<std::size_t> overlap_point;
};

[[nodiscard]] BallFamily check_admissible(const MetricMeasureSpace& space, const Ball& b0, BallFamily family);
[[nodiscard]] BallFamily check_admissible(const MetricMeasureSpace& space, const Ball& b0, std::vector<Ball> balls);

/// mu(B) (avg_B |f - f_B|)^p.
[[nodiscard]] double jn_term(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b, double p);

struct MetricJnResult {
  double value = 0.0;  // (sum of terms)^{1/p}
  double sum = 0.0;
  BallFamily family;
  std::size_t evaluations = 0;
  std::size_t candidates = 0;
  bool exhaustive = false;  // every admissible family over the candidates was evaluated
};

inline constexpr std::size_t kExhaustiveCandidateLimit = 20;

/// Best admissible family over realized balls centered in B0 and inside 11B0: exhaustive for few candidates,
/// otherwise seeded (singletons, Vitali selections at several radius scales, weight-greedy) and improved by
/// insert/evict moves in a seed-determined order. At most `budget` family evaluations.
[[nodiscard]] MetricJnResult jnp_metric_lower(const MetricMeasureSpace& space, std::span<const double> f,
                                              const Ball& b0, double p, std::size_t budget,
                                              std::uint64_t seed = 0);

/// Max over all realized balls of the mean oscillation.
[[nodiscard]] double bmo_norm_metric(const MetricMeasureSpace& space, std::span<const double> f);

/// Coordinates header `x0,...,weight`, or distance rows `d0,...,d{m-1},weight`.
void write_space_csv(std::ostream& out, const MetricMeasureSpace& space);
[[nodiscard]] MetricMeasureSpace read_space_csv(std::istream& in);
/// `index,value` rows.
void write_point_function_csv(std::ostream& out, std::span<const double> f);
[[nodiscard]] std::vector<double> read_point_function_csv(std::istream& in, std::size_t expected_size);

}  // namespace jnlab
