#include "jnlab/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jnlab::reference {

namespace {

// Lexicographic index (relative to q0) of the depth-`level` ancestor of the cell with relative coordinates `cell`.
std::size_t ancestor_index(std::span<const std::int64_t> cell, int shift, int level) {
  std::size_t idx = 0;
  for (std::int64_t c : cell) idx = (idx << level) | static_cast<std::size_t>(c >> shift);
  return idx;
}

// Sums of f (or |f|) over every subcube of q0, built bottom-up from the finest cells.
std::vector<std::vector<double>> level_sums(const GridFunction& f, const DyadicCube& q0, bool absolute) {
  require_cube_in_grid(f, q0);
  const int n = f.dimension();
  const int levels = f.max_depth() - q0.depth();
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(levels) + 1);
  const std::size_t cells = std::size_t{1} << (n * levels);
  sums[levels].assign(cells, 0.0);
  std::vector<std::int64_t> base = q0.index();
  for (auto& b : base) b <<= levels;
  std::vector<std::int64_t> rel(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> abs_coords(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < cells; ++i) {
    std::size_t rest = i;
    for (int d = n - 1; d >= 0; --d) {
      rel[d] = static_cast<std::int64_t>(rest & ((std::size_t{1} << levels) - 1));
      rest >>= levels;
    }
    for (int d = 0; d < n; ++d) abs_coords[d] = base[d] + rel[d];
    const double v = f.values()[f.cell_index(abs_coords)];
    sums[levels][i] = absolute ? std::abs(v) : v;
  }
  for (int l = levels - 1; l >= 0; --l) {
    sums[l].assign(std::size_t{1} << (n * l), 0.0);
    std::vector<std::int64_t> c(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < sums[l + 1].size(); ++i) {
      std::size_t rest = i;
      for (int d = n - 1; d >= 0; --d) {
        c[d] = static_cast<std::int64_t>(rest & ((std::size_t{1} << (l + 1)) - 1));
        rest >>= (l + 1);
      }
      sums[l][ancestor_index(c, 1, l)] += sums[l + 1][i];
    }
  }
  return sums;
}

std::vector<double> scatter(const MetricMeasureSpace& space, std::span<const double> f, const PointSet* inside) {
  const std::size_t m = space.size();
  std::vector<double> out(m, -std::numeric_limits<double>::infinity());
  for (const Ball& b : realized_balls(space)) {
    const PointSet s = space.member_set(b);
    if (inside != nullptr && !s.subset_of(*inside)) continue;
    const double avg = space.average(f, b);
    for (std::size_t y = 0; y < m; ++y) {
      if (s.test(y)) out[y] = std::max(out[y], avg);
    }
  }
  return out;
}

}  // namespace

MaximalField dyadic_maximal(const GridFunction& f, const DyadicCube& q0) {
  const auto sums = level_sums(f, q0, true);
  const int n = f.dimension();
  const int levels = f.max_depth() - q0.depth();
  MaximalField out{q0, levels, {}, {}};
  out.values.resize(sums[levels].size());
  out.provenance.resize(sums[levels].size());
  std::vector<std::int64_t> c(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    std::size_t rest = i;
    for (int d = n - 1; d >= 0; --d) {
      c[d] = static_cast<std::int64_t>(rest & ((std::size_t{1} << levels) - 1));
      rest >>= levels;
    }
    double best = -1.0;
    int at = 0;
    for (int l = 0; l <= levels; ++l) {
      const double cells = std::ldexp(1.0, n * (levels - l));
      const double value = sums[l][ancestor_index(c, levels - l, l)] / cells;
      if (value > best) {
        best = value;
        at = q0.depth() + l;
      }
    }
    out.values[i] = best;
    out.provenance[i] = at;
  }
  return out;
}

std::vector<std::vector<double>> oscillation_table(const GridFunction& f, const DyadicCube& q0) {
  const auto sums = level_sums(f, q0, false);
  const int n = f.dimension();
  const int levels = f.max_depth() - q0.depth();
  const auto& cells = sums[levels];
  std::vector<std::vector<double>> osc(static_cast<std::size_t>(levels) + 1);
  std::vector<std::int64_t> c(static_cast<std::size_t>(n));
  for (int l = 0; l <= levels; ++l) {
    const double width = std::ldexp(1.0, n * (levels - l));
    std::vector<double> mean(sums[l].size());
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] = sums[l][k] / width;
    osc[l].assign(sums[l].size(), 0.0);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::size_t rest = i;
      for (int d = n - 1; d >= 0; --d) {
        c[d] = static_cast<std::int64_t>(rest & ((std::size_t{1} << levels) - 1));
        rest >>= levels;
      }
      const std::size_t k = ancestor_index(c, levels - l, l);
      osc[l][k] += std::abs(cells[i] - mean[k]);
    }
    for (double& v : osc[l]) v /= width;
  }
  return osc;
}

std::vector<double> hl_maximal_restricted(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0) {
  const PointSet inside = space.member_set(b0);
  auto out = scatter(space, f, &inside);
  for (std::size_t y = 0; y < out.size(); ++y) {
    if (!inside.test(y)) out[y] = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<double> global_maximal(const MetricMeasureSpace& space, std::span<const double> f) {
  std::vector<double> absf(f.begin(), f.end());
  for (double& v : absf) v = std::abs(v);
  return scatter(space, absf, nullptr);
}

double bmo_norm_metric(const MetricMeasureSpace& space, std::span<const double> f) {
  double best = 0.0;
  for (const Ball& b : realized_balls(space)) best = std::max(best, space.mean_oscillation(f, b));
  return best;
}

}  // namespace jnlab::reference
