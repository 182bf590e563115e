#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "jnlab/dyadic_core.hpp"

namespace jnlab {

/// Supremum of sum |Q_i| osc(Q_i)^p over dyadic partitions of Q0, with an optimal partition.
struct PartitionValue {
  double value = 0.0;  // the supremum of the sum (norm^p)
  double norm = 0.0;   // value^{1/p}
  double p = 2.0;
  std::vector<DyadicCube> witness;
  std::size_t partitions_enumerated = 0;  // brute force only
};

/// Bottom-up recurrence value(Q) = max(|Q| osc(Q)^p, sum over children); ties keep Q.
[[nodiscard]] PartitionValue jnp_dyadic(const GridFunction& f, const DyadicCube& q0, double p);
/// Restricted to cubes at most `levels` below Q0.
[[nodiscard]] PartitionValue jnp_dyadic(const GridFunction& f, const DyadicCube& q0, double p, int levels);

inline constexpr int kBruteForceMaxLevels = 3;
inline constexpr std::size_t kBruteForcePartitionLimit = 2'000'000;

/// Exhaustive search over every dyadic partition of Q0 using cubes at most `levels` (<= 3) below Q0.
[[nodiscard]] PartitionValue jnp_bruteforce(const GridFunction& f, const DyadicCube& q0, double p, int levels);

/// Number of dyadic partitions of a cube into subcubes at most `levels` below it.
[[nodiscard]] double count_dyadic_partitions(int dimension, int levels);

/// Calls `visit` once per dyadic partition of q (cubes at most `levels` below q).
void for_each_dyadic_partition(const DyadicCube& q, int levels,
                               const std::function<void(std::span<const DyadicCube>)>& visit);

/// sum |Q| osc(Q)^p over the given cubes, in the given order.
[[nodiscard]] double partition_sum(const GridFunction& f, std::span<const DyadicCube> cubes, double p);

/// osc[level][morton code] = mean oscillation of every dyadic subcube of the tree's top cube.
[[nodiscard]] std::vector<std::vector<double>> oscillation_table(const DyadicTree& tree);

/// max mean oscillation over all dyadic subcubes of Q0 (Q0 included).
[[nodiscard]] double bmo_dyadic(const GridFunction& f, const DyadicCube& q0);

/// |{x in Q0 : |f - f_Q0| > lambda}|.
[[nodiscard]] double distribution(const GridFunction& f, const DyadicCube& q0, double lambda);

/// sup_t t |{|g| >= t}|^{1/p} over the distinct values t of |g|; g = f - f_Q0 when centered, else f.
[[nodiscard]] double weak_lp(const GridFunction& f, const DyadicCube& q0, double p, bool centered = true);

/// x^{-1/p} on [0,2) sampled at depth D, and the terms |Q_j| osc(Q_j)^p for Q_j = [2^{-j}, 2^{1-j}), j < J.
[[nodiscard]] std::vector<double> notlp_terms(double p, int J, int D);
[[nodiscard]] GridFunction power_singularity(double p, int D, int dimension = 1);

/// j,term,partial_sum
void write_notlp_csv(std::ostream& out, std::span<const double> terms);

}  // namespace jnlab
