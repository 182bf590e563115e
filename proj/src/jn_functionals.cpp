#include "jnlab/jn_functionals.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "jnlab/numeric.hpp"

namespace jnlab {

namespace {

void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be a finite number > 1");
}

double term(double measure, double osc, double p) { return measure * std::pow(osc, p); }

// Pre-order walk collecting the kept cubes.
void collect_witness(const DyadicTree& tree, const std::vector<std::vector<char>>& keep, int level, std::size_t code,
                     std::vector<DyadicCube>& out) {
  if (keep[level][code] != 0) {
    out.push_back(tree.cube(level, code));
    return;
  }
  const std::size_t fan = std::size_t{1} << tree.dimension();
  for (std::size_t j = 0; j < fan; ++j) collect_witness(tree, keep, level + 1, code * fan + j, out);
}

}  // namespace

std::vector<std::vector<double>> oscillation_table(const DyadicTree& tree) {
  const auto vals = tree.morton_values();
  std::vector<std::vector<double>> osc(static_cast<std::size_t>(tree.levels()) + 1);
  for (int l = 0; l <= tree.levels(); ++l) {
    const std::size_t cubes = tree.cubes_at(l);
    osc[l].assign(cubes, 0.0);
    if (l == tree.levels()) continue;  // single cells
    const std::size_t width = tree.cells_in(l);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(cubes); ++c) {
      const double mean = tree.average(l, static_cast<std::size_t>(c));
      NeumaierSum s;
      const std::size_t lo = static_cast<std::size_t>(c) * width;
      for (std::size_t i = lo; i < lo + width; ++i) s.add(std::abs(vals[i] - mean));
      osc[l][c] = s.value() / static_cast<double>(width);
    }
  }
  return osc;
}

PartitionValue jnp_dyadic(const GridFunction& f, const DyadicCube& q0, double p) {
  require_cube_in_grid(f, q0);
  return jnp_dyadic(f, q0, p, f.max_depth() - q0.depth());
}

PartitionValue jnp_dyadic(const GridFunction& f, const DyadicCube& q0, double p, int levels) {
  require_p(p);
  require_cube_in_grid(f, q0);
  if (levels < 0 || levels > f.max_depth() - q0.depth()) {
    throw std::invalid_argument("jnp_dyadic: levels must lie in [0, grid depth below Q0]");
  }
  const DyadicTree tree(f, q0);
  const auto osc = oscillation_table(tree);
  const std::size_t fan = std::size_t{1} << tree.dimension();

  std::vector<std::vector<double>> best(static_cast<std::size_t>(levels) + 1);
  std::vector<std::vector<char>> keep(static_cast<std::size_t>(levels) + 1);
  best[levels].resize(tree.cubes_at(levels));
  keep[levels].assign(tree.cubes_at(levels), 1);
  for (std::size_t c = 0; c < best[levels].size(); ++c) best[levels][c] = term(tree.measure_at(levels), osc[levels][c], p);

  for (int l = levels - 1; l >= 0; --l) {
    const std::size_t cubes = tree.cubes_at(l);
    best[l].resize(cubes);
    keep[l].resize(cubes);
    const double mu = tree.measure_at(l);
    const auto& below = best[l + 1];
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(cubes); ++c) {
      double split = 0.0;
      const std::size_t base = static_cast<std::size_t>(c) * fan;
      for (std::size_t j = 0; j < fan; ++j) split += below[base + j];
      const double here = term(mu, osc[l][c], p);
      keep[l][c] = here >= split ? 1 : 0;
      best[l][c] = here >= split ? here : split;
    }
  }

  PartitionValue out;
  out.p = p;
  out.value = best[0][0];
  out.norm = std::pow(out.value, 1.0 / p);
  collect_witness(tree, keep, 0, 0, out.witness);
  return out;
}

double count_dyadic_partitions(int dimension, int levels) {
  if (dimension < 1 || levels < 0) throw std::invalid_argument("count_dyadic_partitions: bad arguments");
  double count = 1.0;
  for (int l = 1; l <= levels; ++l) count = 1.0 + std::pow(count, std::exp2(dimension));
  return count;
}

void for_each_dyadic_partition(const DyadicCube& q, int levels,
                               const std::function<void(std::span<const DyadicCube>)>& visit) {
  // Odometer over per-child partition choices, built recursively on materialized lists.
  std::function<std::vector<std::vector<DyadicCube>>(const DyadicCube&, int)> all = [&](const DyadicCube& c, int left) {
    std::vector<std::vector<DyadicCube>> parts;
    parts.push_back({c});
    if (left == 0) return parts;
    const auto kids = c.children();
    std::vector<std::vector<std::vector<DyadicCube>>> sub;
    sub.reserve(kids.size());
    for (const auto& k : kids) sub.push_back(all(k, left - 1));
    std::vector<std::size_t> pick(kids.size(), 0);
    while (true) {
      std::vector<DyadicCube> joined;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        const auto& chosen = sub[i][pick[i]];
        joined.insert(joined.end(), chosen.begin(), chosen.end());
      }
      parts.push_back(std::move(joined));
      std::size_t i = kids.size();
      while (i > 0) {
        --i;
        if (++pick[i] < sub[i].size()) break;
        pick[i] = 0;
        if (i == 0) return parts;
      }
    }
  };

  // The top level is streamed; only the children's partition lists are materialized.
  visit(std::span<const DyadicCube>(&q, 1));
  if (levels == 0) return;
  const auto kids = q.children();
  std::vector<std::vector<std::vector<DyadicCube>>> sub;
  for (const auto& k : kids) sub.push_back(all(k, levels - 1));
  std::vector<std::size_t> pick(kids.size(), 0);
  std::vector<DyadicCube> joined;
  while (true) {
    joined.clear();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const auto& chosen = sub[i][pick[i]];
      joined.insert(joined.end(), chosen.begin(), chosen.end());
    }
    visit(joined);
    std::size_t i = kids.size();
    while (i > 0) {
      --i;
      if (++pick[i] < sub[i].size()) break;
      pick[i] = 0;
      if (i == 0) return;
    }
  }
}

double partition_sum(const GridFunction& f, std::span<const DyadicCube> cubes, double p) {
  double s = 0.0;
  for (const auto& q : cubes) s += term(q.measure(), mean_oscillation(f, q), p);
  return s;
}

PartitionValue jnp_bruteforce(const GridFunction& f, const DyadicCube& q0, double p, int levels) {
  require_p(p);
  require_cube_in_grid(f, q0);
  if (levels < 0 || levels > kBruteForceMaxLevels) {
    throw std::invalid_argument("jnp_bruteforce: levels must lie in [0, 3], got " + std::to_string(levels));
  }
  if (q0.depth() + levels > f.max_depth()) throw std::invalid_argument("jnp_bruteforce: levels exceed the grid depth");
  const double count = count_dyadic_partitions(f.dimension(), levels);
  if (count > static_cast<double>(kBruteForcePartitionLimit)) {
    throw std::invalid_argument("jnp_bruteforce: " + format_double(count) + " partitions exceed the enumeration limit");
  }

  // Terms are looked up per cube; each partition is summed flat in its own order.
  std::map<std::pair<int, std::vector<std::int64_t>>, double> terms;
  auto term_of = [&](const DyadicCube& q) {
    auto key = std::make_pair(q.depth(), q.index());
    auto it = terms.find(key);
    if (it == terms.end()) it = terms.emplace(std::move(key), term(q.measure(), mean_oscillation(f, q), p)).first;
    return it->second;
  };

  PartitionValue out;
  out.p = p;
  out.value = -1.0;
  for_each_dyadic_partition(q0, levels, [&](std::span<const DyadicCube> part) {
    ++out.partitions_enumerated;
    double s = 0.0;
    for (const auto& q : part) s += term_of(q);
    // Strictly larger wins; on ties the earlier (coarser-first) partition stays.
    if (s > out.value) {
      out.value = s;
      out.witness.assign(part.begin(), part.end());
    }
  });
  out.norm = std::pow(out.value, 1.0 / p);
  return out;
}

double bmo_dyadic(const GridFunction& f, const DyadicCube& q0) {
  require_cube_in_grid(f, q0);
  const DyadicTree tree(f, q0);
  double best = 0.0;
  for (const auto& level : oscillation_table(tree)) {
    for (double o : level) best = std::max(best, o);
  }
  return best;
}

namespace {

std::vector<double> deviations(const GridFunction& f, const DyadicCube& q0, bool centered) {
  const GridFunction sub = f.restricted_to(q0);
  const double mean = centered ? average(f, q0) : 0.0;
  std::vector<double> dev(sub.values().begin(), sub.values().end());
  for (double& v : dev) v = std::abs(v - mean);
  return dev;
}

}  // namespace

double distribution(const GridFunction& f, const DyadicCube& q0, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("distribution: lambda must be >= 0");
  const auto dev = deviations(f, q0, true);
  std::size_t above = 0;
  for (double d : dev) above += d > lambda ? 1 : 0;
  return q0.measure() * static_cast<double>(above) / static_cast<double>(dev.size());
}

double weak_lp(const GridFunction& f, const DyadicCube& q0, double p, bool centered) {
  require_p(p);
  auto dev = deviations(f, q0, centered);
  std::sort(dev.begin(), dev.end(), std::greater<>());
  const double cell = q0.measure() / static_cast<double>(dev.size());
  double best = 0.0;
  for (std::size_t i = 0; i < dev.size(); ++i) {
    const double t = dev[i];
    if (t <= 0.0) break;
    if (i + 1 < dev.size() && dev[i + 1] == t) continue;  // count every cell with |g| >= t
    best = std::max(best, t * std::pow(cell * static_cast<double>(i + 1), 1.0 / p));
  }
  return best;
}

GridFunction power_singularity(double p, int D, int dimension) {
  require_p(p);
  const double expo = -static_cast<double>(dimension) / p;
  return GridFunction::sample(RootGeometry::unit(dimension, 2.0), D, [expo](std::span<const double> x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return std::pow(std::sqrt(r2), expo);
  });
}

std::vector<double> notlp_terms(double p, int J, int D) {
  require_p(p);
  if (J < 1) throw std::invalid_argument("notlp_terms: J must be >= 1");
  if (D < J + 2) {
    throw std::invalid_argument("notlp_terms: depth D=" + std::to_string(D) + " too shallow for J=" + std::to_string(J) +
                                " (need D >= J+2)");
  }
  const GridFunction f = power_singularity(p, D, 1);
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    const DyadicCube qj(f.root(), j + 1, {1});
    terms.push_back(term(qj.measure(), mean_oscillation(f, qj), p));
  }
  return terms;
}

void write_notlp_csv(std::ostream& out, std::span<const double> terms) {
  out << "j,term,partial_sum\n";
  double partial = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    partial += terms[j];
    out << j << ',' << format_double(terms[j]) << ',' << format_double(partial) << '\n';
  }
}

}  // namespace jnlab
