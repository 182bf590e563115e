#include "jnlab/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace jnlab {

namespace {

constexpr double kGrain = 64.0;

double random_grain(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return static_cast<double>(rng.integer(lo, hi)) / kGrain;
}

[[noreturn]] void unknown(const std::string& what, const std::string& name, const std::vector<std::string>& known) {
  std::string list;
  for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
  throw std::invalid_argument("unknown " + what + " '" + name + "' (expected one of: " + list + ")");
}

GridFunction random_martingale(const FunctionParams& prm) {
  const RootGeometry root = RootGeometry::unit(prm.dimension);
  const int n = prm.dimension;
  const std::size_t kids = std::size_t{1} << n;
  Rng rng(prm.seed);
  // Values in Morton order, refined level by level.
  std::vector<double> level{0.0};
  for (int d = 0; d < prm.depth; ++d) {
    std::vector<double> next(level.size() * kids);
    for (std::size_t c = 0; c < level.size(); ++c) {
      double sum = 0.0;
      for (std::size_t k = 0; k + 1 < kids; ++k) {
        const double inc = random_grain(rng, -8, 8);
        next[c * kids + k] = level[c] + inc;
        sum += inc;
      }
      next[c * kids + kids - 1] = level[c] - sum;
    }
    level = std::move(next);
  }
  std::vector<double> lex(level.size());
  const std::int64_t side = std::int64_t{1} << prm.depth;
  for (std::size_t code = 0; code < level.size(); ++code) {
    const auto coords = morton_decode(code, n, prm.depth);
    std::size_t idx = 0;
    for (int i = 0; i < n; ++i) idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(coords[i]);
    lex[idx] = level[code];
  }
  return GridFunction(root, prm.depth, std::move(lex));
}

std::vector<double> pairwise(std::size_t m, const auto& dist) {
  std::vector<double> d(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) d[i * m + j] = dist(i, j);
  }
  return d;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::int64_t Rng::integer(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("Rng::integer: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(engine_());
  // Rejection sampling keeps the draw unbiased and independent of the standard library.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

std::vector<std::string> function_generator_names() {
  return {"constant", "step", "power-singularity", "log-singularity", "random-uniform", "random-martingale"};
}

std::vector<std::string> space_kinds() { return {"line", "grid2d", "tree-graph", "random-cloud"}; }

std::vector<std::string> point_function_names() { return {"constant", "step", "random-uniform", "log-distance"}; }

bool is_function_generator(const std::string& name) {
  const auto all = function_generator_names();
  return std::find(all.begin(), all.end(), name) != all.end();
}

bool is_space_kind(const std::string& name) {
  const auto all = space_kinds();
  return std::find(all.begin(), all.end(), name) != all.end();
}

GridFunction generate_function(const std::string& name, const FunctionParams& prm) {
  if (prm.dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  if (prm.depth < 0) throw std::invalid_argument("depth must be >= 0");
  const RootGeometry unit = RootGeometry::unit(prm.dimension);
  if (name == "constant") {
    return GridFunction::sample(unit, prm.depth, [](std::span<const double>) { return 1.0; });
  }
  if (name == "step") {
    if (prm.depth < 1) throw std::invalid_argument("step needs depth >= 1");
    return GridFunction::sample(unit, prm.depth, [](std::span<const double> x) { return x[0] < 0.5 ? 0.0 : 1.0; });
  }
  if (name == "power-singularity") {
    if (!(prm.p > 1.0)) throw std::invalid_argument("power-singularity needs p > 1");
    const double expo = -static_cast<double>(prm.dimension) / prm.p;
    return GridFunction::sample(RootGeometry::unit(prm.dimension, 2.0), prm.depth, [expo](std::span<const double> x) {
      double r2 = 0.0;
      for (double xi : x) r2 += xi * xi;
      return std::pow(std::sqrt(r2), expo);
    });
  }
  if (name == "log-singularity") {
    return GridFunction::sample(unit, prm.depth, [](std::span<const double> x) {
      double r2 = 0.0;
      for (double xi : x) r2 += xi * xi;
      return 0.5 * std::log(r2);
    });
  }
  if (name == "random-uniform") {
    Rng rng(prm.seed);
    std::vector<double> v(std::size_t{1} << (prm.dimension * prm.depth));
    for (auto& x : v) x = random_grain(rng, -64, 64);
    return GridFunction(unit, prm.depth, std::move(v));
  }
  if (name == "random-martingale") return random_martingale(prm);
  unknown("generator", name, function_generator_names());
}

MetricMeasureSpace generate_space(const std::string& kind, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("space needs at least one point");
  if (kind == "line") {
    std::vector<std::vector<double>> pts(m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = {static_cast<double>(i)};
    auto d = pairwise(m, [](std::size_t i, std::size_t j) { return std::abs(double(i) - double(j)); });
    return build_space(std::move(pts), std::move(d), std::vector<double>(m, 1.0));
  }
  if (kind == "grid2d") {
    const auto w = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m)) - 1e-12));
    std::vector<std::vector<double>> pts(m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = {double(i / w), double(i % w)};
    auto d = pairwise(m, [&](std::size_t i, std::size_t j) {
      return std::abs(pts[i][0] - pts[j][0]) + std::abs(pts[i][1] - pts[j][1]);
    });
    return build_space(pts, std::move(d), std::vector<double>(m, 1.0));
  }
  if (kind == "tree-graph") {
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> adj(m);
    for (std::size_t i = 1; i < m; ++i) {
      const auto parent = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i) - 1));
      adj[i].push_back(parent);
      adj[parent].push_back(i);
    }
    std::vector<double> d(m * m, -1.0);
    for (std::size_t s = 0; s < m; ++s) {
      std::queue<std::size_t> bfs;
      d[s * m + s] = 0.0;
      bfs.push(s);
      while (!bfs.empty()) {
        const std::size_t u = bfs.front();
        bfs.pop();
        for (std::size_t v : adj[u]) {
          if (d[s * m + v] < 0.0) {
            d[s * m + v] = d[s * m + u] + 1.0;
            bfs.push(v);
          }
        }
      }
    }
    return build_space({}, std::move(d), std::vector<double>(m, 1.0));
  }
  if (kind == "random-cloud") {
    Rng rng(seed);
    std::vector<std::vector<double>> pts(m);
    std::vector<double> wts(m);
    for (std::size_t i = 0; i < m; ++i) pts[i] = {rng.uniform(), rng.uniform()};
    for (std::size_t i = 0; i < m; ++i) wts[i] = 0.5 + rng.uniform();
    return build_euclidean_space(std::move(pts), std::move(wts));
  }
  unknown("space kind", kind, space_kinds());
}

std::vector<double> generate_point_function(const std::string& name, const MetricMeasureSpace& space,
                                            std::uint64_t seed) {
  const std::size_t m = space.size();
  std::vector<double> f(m, 0.0);
  if (name == "constant") {
    std::fill(f.begin(), f.end(), 1.0);
  } else if (name == "step") {
    for (std::size_t i = m / 2; i < m; ++i) f[i] = 1.0;
  } else if (name == "random-uniform") {
    Rng rng(seed);
    for (auto& x : f) x = random_grain(rng, -64, 64);
  } else if (name == "log-distance") {
    Rng rng(seed);
    const auto y0 = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(m) - 1));
    double nearest = 1.0;
    if (m > 1) nearest = space.shells(y0)[1];
    for (std::size_t y = 0; y < m; ++y) {
      const double d = y == y0 ? 0.5 * nearest : space.distance(y0, y);
      f[y] = -std::log(d);
    }
  } else {
    unknown("point function", name, point_function_names());
  }
  return f;
}

}  // namespace jnlab
