#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "jnlab/dyadic_core.hpp"
#include "jnlab/metric_space.hpp"

namespace jnlab {

/// mt19937_64 with a portable double conversion, so a seed gives the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

struct FunctionParams {
  double p = 2.0;
  int depth = 8;
  int dimension = 1;
  std::uint64_t seed = 0;
};

[[nodiscard]] std::vector<std::string> function_generator_names();
[[nodiscard]] std::vector<std::string> space_kinds();
[[nodiscard]] bool is_function_generator(const std::string& name);
[[nodiscard]] bool is_space_kind(const std::string& name);

/// Grid function generators. Random generators produce multiples of 1/64, so averages over dyadic cubes are exact.
///   constant           1 everywhere
///   step               0 where the first coordinate is in the lower half, 1 elsewhere
///   power-singularity  |x|^{-n/p} on [0,2)^n
///   log-singularity    log|x| on [0,1)^n
///   random-uniform     independent values in {-1, -63/64, ..., 1}
///   random-martingale  dyadic martingale: each cube splits its value by mean-zero increments
[[nodiscard]] GridFunction generate_function(const std::string& name, const FunctionParams& params);

/// Finite spaces with m points:
///   line          integers 0..m-1, |i-j|, unit weights
///   grid2d        row-major on a ceil(sqrt m)-wide grid, L1 (graph) distance, unit weights
///   tree-graph    random recursive tree, graph distance, unit weights
///   random-cloud  uniform points in the unit square, Euclidean, weights in [1/2, 3/2)
[[nodiscard]] MetricMeasureSpace generate_space(const std::string& kind, std::size_t m, std::uint64_t seed);

/// Point functions on a space:
///   constant, step (1 on the upper half of the indices), random-uniform (multiples of 1/64 in [-1,1]),
///   log-distance (-log of the distance to a random point, the point itself at half the nearest distance)
[[nodiscard]] std::vector<double> generate_point_function(const std::string& name, const MetricMeasureSpace& space,
                                                          std::uint64_t seed);
[[nodiscard]] std::vector<std::string> point_function_names();

}  // namespace jnlab
