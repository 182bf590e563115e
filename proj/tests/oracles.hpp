#pragma once

// Brute-force oracles shared by the unit tests and the acceptance runner. They work from raw values,
// coordinates and distance matrices only, never through the library's trees, tables or neighbour orders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jnlab/dyadic_core.hpp"
#include "jnlab/metric_space.hpp"

namespace oracle {

using jnlab::Ball;
using jnlab::DyadicCube;
using jnlab::GridFunction;
using jnlab::MetricMeasureSpace;

// ---- dyadic ----

// Lexicographic coordinates of cell `lex` in a grid with `side` cells per axis.
inline std::vector<std::int64_t> coords_of(std::size_t lex, int n, std::int64_t side) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(n));
  for (int d = n - 1; d >= 0; --d) {
    c[d] = static_cast<std::int64_t>(lex % static_cast<std::size_t>(side));
    lex /= static_cast<std::size_t>(side);
  }
  return c;
}

// Calls fn(value) for every finest cell of q, by nested loops over the cube's coordinate box.
template <class Fn>
void for_cells(const GridFunction& f, const DyadicCube& q, Fn&& fn) {
  const int n = f.dimension();
  const int shift = f.max_depth() - q.depth();
  const std::int64_t width = std::int64_t{1} << shift;
  const std::int64_t side = f.cells_per_side();
  std::vector<std::int64_t> off(static_cast<std::size_t>(n), 0);
  for (;;) {
    std::size_t lex = 0;
    for (int d = 0; d < n; ++d) lex = lex * static_cast<std::size_t>(side) + static_cast<std::size_t>((q.index()[d] << shift) + off[d]);
    fn(f.values()[lex]);
    int d = n - 1;
    while (d >= 0 && ++off[d] == width) off[d--] = 0;
    if (d < 0) break;
  }
}

inline double cube_average(const GridFunction& f, const DyadicCube& q, bool absolute) {
  double s = 0.0;
  double count = 0.0;
  for_cells(f, q, [&](double v) {
    s += absolute ? std::abs(v) : v;
    count += 1.0;
  });
  return s / count;
}

inline double cube_oscillation(const GridFunction& f, const DyadicCube& q) {
  const double mean = cube_average(f, q, false);
  double s = 0.0;
  double count = 0.0;
  for_cells(f, q, [&](double v) {
    s += std::abs(v - mean);
    count += 1.0;
  });
  return s / count;
}

struct BruteMaximal {
  std::vector<double> values;   // lexicographic relative to q0
  std::vector<int> provenance;  // absolute depth of the shallowest attaining cube
};

// For every cell of q0: max of |f|-averages over every dyadic cube of q0 containing it.
inline BruteMaximal brute_maximal(const GridFunction& f, const DyadicCube& q0) {
  const int n = f.dimension();
  const int levels = f.max_depth() - q0.depth();
  const std::int64_t rel_side = std::int64_t{1} << levels;
  const std::size_t cells = std::size_t{1} << (n * levels);
  // table[k][lexicographic index of the depth-k cube relative to q0], filled on first use
  std::vector<std::vector<double>> table(static_cast<std::size_t>(levels) + 1);
  for (int k = 0; k <= levels; ++k) table[k].assign(std::size_t{1} << (n * k), std::numeric_limits<double>::quiet_NaN());
  BruteMaximal out;
  out.values.resize(cells);
  out.provenance.resize(cells);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < cells; ++i) {
    const auto rel = coords_of(i, n, rel_side);
    double best = -1.0;
    int at = -1;
    for (int k = 0; k <= levels; ++k) {
      std::size_t key = 0;
      for (int d = 0; d < n; ++d) {
        const std::int64_t r = rel[d] >> (levels - k);
        key = (key << k) | static_cast<std::size_t>(r);
        idx[d] = (q0.index()[d] << k) + r;
      }
      double& slot = table[k][key];
      if (std::isnan(slot)) slot = cube_average(f, DyadicCube(f.root(), q0.depth() + k, idx), true);
      if (slot > best) {
        best = slot;
        at = q0.depth() + k;
      }
    }
    out.values[i] = best;
    out.provenance[i] = at;
  }
  return out;
}

// Every dyadic subcube of q0 down to the grid depth, coarsest first, lexicographic within a level.
inline std::vector<DyadicCube> all_subcubes(const GridFunction& f, const DyadicCube& q0) {
  std::vector<DyadicCube> out;
  const int n = f.dimension();
  for (int k = 0; k <= f.max_depth() - q0.depth(); ++k) {
    const std::int64_t side = std::int64_t{1} << k;
    const std::size_t count = std::size_t{1} << (n * k);
    for (std::size_t i = 0; i < count; ++i) {
      auto rel = coords_of(i, n, side);
      for (int d = 0; d < n; ++d) rel[d] += q0.index()[d] << k;
      out.emplace_back(f.root(), q0.depth() + k, rel);
    }
  }
  return out;
}

inline double brute_bmo(const GridFunction& f, const DyadicCube& q0) {
  double best = 0.0;
  for (const auto& q : all_subcubes(f, q0)) best = std::max(best, cube_oscillation(f, q));
  return best;
}

// Measure of cells of q0 where |g(cell)| > lambda, for g given on the cells of q0 (lexicographic).
inline double measure_above(std::span<const double> g, double lambda, double cell_measure) {
  double count = 0.0;
  for (double v : g) count += std::abs(v) > lambda ? 1.0 : 0.0;
  return count * cell_measure;
}

// Values of f on q0's cells, lexicographic relative to q0.
inline std::vector<double> restrict_values(const GridFunction& f, const DyadicCube& q0) {
  std::vector<double> out;
  for_cells(f, q0, [&](double v) { out.push_back(v); });
  return out;
}

inline double brute_distribution(const GridFunction& f, const DyadicCube& q0, double lambda) {
  const auto v = restrict_values(f, q0);
  const double mean = cube_average(f, q0, false);
  double count = 0.0;
  for (double x : v) count += std::abs(x - mean) > lambda ? 1.0 : 0.0;
  return count * q0.measure() / static_cast<double>(v.size());
}

// ---- metric ----

inline std::vector<std::size_t> members(const MetricMeasureSpace& s, std::size_t c, double r) {
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < s.size(); ++y) {
    if (s.metric()[c * s.size() + y] < r) out.push_back(y);
  }
  return out;
}

inline double measure(const MetricMeasureSpace& s, const std::vector<std::size_t>& pts) {
  double m = 0.0;
  for (auto y : pts) m += s.weights()[y];
  return m;
}

inline double ball_measure(const MetricMeasureSpace& s, const Ball& b) { return measure(s, members(s, b.center, b.radius)); }

inline double ball_average(const MetricMeasureSpace& s, std::span<const double> f, const Ball& b) {
  double num = 0.0;
  double den = 0.0;
  for (auto y : members(s, b.center, b.radius)) {
    num += s.weights()[y] * f[y];
    den += s.weights()[y];
  }
  return num / den;
}

inline double ball_oscillation(const MetricMeasureSpace& s, std::span<const double> f, const Ball& b) {
  const double mean = ball_average(s, f, b);
  double num = 0.0;
  double den = 0.0;
  for (auto y : members(s, b.center, b.radius)) {
    num += s.weights()[y] * std::abs(f[y] - mean);
    den += s.weights()[y];
  }
  return num / den;
}

inline bool subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return common.empty();
}

// All balls by brute force: every center with every radius equal to a distance from it (the open ball just
// excludes that shell) plus one radius past the diameter. Covers every member set an open ball can have.
inline std::vector<Ball> every_ball(const MetricMeasureSpace& s) {
  std::vector<Ball> out;
  double diam = 0.0;
  for (double d : s.metric()) diam = std::max(diam, d);
  for (std::size_t c = 0; c < s.size(); ++c) {
    std::vector<double> radii;
    for (std::size_t y = 0; y < s.size(); ++y) {
      if (s.metric()[c * s.size() + y] > 0.0) radii.push_back(s.metric()[c * s.size() + y]);
    }
    radii.push_back(2.0 * diam + 1.0);
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    for (double r : radii) out.push_back(Ball{c, r});
  }
  return out;
}

// sup over balls of mu(2B)/mu(B): for each center the sup within a member-set class is reached at the
// right end of its radius interval, which is a distance from the center (or any radius past the diameter).
inline double doubling(const MetricMeasureSpace& s) {
  double best = 1.0;
  for (const Ball& b : every_ball(s)) best = std::max(best, ball_measure(s, b.dilate(2.0)) / ball_measure(s, b));
  return best;
}

// sup of averages of f over balls containing x and contained in `inside` (nullopt: no restriction).
inline std::vector<double> maximal(const MetricMeasureSpace& s, std::span<const double> f,
                                   const std::optional<Ball>& inside) {
  std::vector<double> out(s.size(), -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> allowed;
  if (inside) allowed = members(s, inside->center, inside->radius);
  for (const Ball& b : every_ball(s)) {
    const auto mem = members(s, b.center, b.radius);
    if (inside && !subset(mem, allowed)) continue;
    const double avg = ball_average(s, f, b);
    for (auto y : mem) out[y] = std::max(out[y], avg);
  }
  if (inside) {
    for (std::size_t y = 0; y < s.size(); ++y) {
      if (!std::binary_search(allowed.begin(), allowed.end(), y)) out[y] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

inline double bmo(const MetricMeasureSpace& s, std::span<const double> f) {
  double best = 0.0;
  for (const Ball& b : every_ball(s)) best = std::max(best, ball_oscillation(s, f, b));
  return best;
}

inline bool admissible(const MetricMeasureSpace& s, const Ball& b0, std::span<const Ball> family) {
  const auto inner = members(s, b0.center, b0.radius);
  const auto big = members(s, b0.center, 11.0 * b0.radius);
  for (std::size_t i = 0; i < family.size(); ++i) {
    if (!std::binary_search(inner.begin(), inner.end(), family[i].center)) return false;
    if (!subset(members(s, family[i].center, family[i].radius), big)) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (!disjoint(members(s, family[i].center, family[i].radius / 5.0),
                    members(s, family[j].center, family[j].radius / 5.0))) {
        return false;
      }
    }
  }
  return true;
}

inline double family_sum(const MetricMeasureSpace& s, std::span<const double> f, std::span<const Ball> family, double p) {
  double total = 0.0;
  for (const Ball& b : family) total += ball_measure(s, b) * std::pow(ball_oscillation(s, f, b), p);
  return total;
}

// Vitali postcondition from scratch: kept balls pairwise disjoint, every input inside some kept 5-dilate union.
inline std::string vitali_violation(const MetricMeasureSpace& s, std::span<const Ball> balls,
                                    std::span<const std::size_t> kept) {
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const Ball& a = balls[kept[i]];
      const Ball& b = balls[kept[j]];
      if (!disjoint(members(s, a.center, a.radius), members(s, b.center, b.radius))) return "kept balls meet";
    }
  }
  std::vector<char> covered(s.size(), 0);
  for (auto k : kept) {
    for (auto y : members(s, balls[k].center, 5.0 * balls[k].radius)) covered[y] = 1;
  }
  for (const Ball& b : balls) {
    for (auto y : members(s, b.center, b.radius)) {
      if (!covered[y]) return "point " + std::to_string(y) + " not covered";
    }
  }
  return {};
}

}  // namespace oracle
