#pragma once

#include <span>
#include <vector>

#include "jnlab/dyadic_cz.hpp"
#include "jnlab/metric_space.hpp"

// Single-threaded reference versions of the parallel kernels. They use different data layouts
// (lexicographic tables, ball-by-ball scatter) so agreement is a meaningful cross-check.
namespace jnlab::reference {

/// Per-level tables of |f| averages in lexicographic cube order, then a maximum along each cell's ancestor chain.
[[nodiscard]] MaximalField dyadic_maximal(const GridFunction& f, const DyadicCube& q0);

/// Mean oscillation of every subcube of q0, indexed [level][lexicographic index relative to q0].
[[nodiscard]] std::vector<std::vector<double>> oscillation_table(const GridFunction& f, const DyadicCube& q0);

/// Enumerates every realized ball inside B0 and scatters its average to its members.
[[nodiscard]] std::vector<double> hl_maximal_restricted(const MetricMeasureSpace& space, std::span<const double> f,
                                                        const Ball& b0);

/// Same scatter over all realized balls, for |f|.
[[nodiscard]] std::vector<double> global_maximal(const MetricMeasureSpace& space, std::span<const double> f);

/// Max over all realized balls of the mean oscillation.
[[nodiscard]] double bmo_norm_metric(const MetricMeasureSpace& space, std::span<const double> f);

}  // namespace jnlab::reference
