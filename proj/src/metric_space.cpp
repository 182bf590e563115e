#include "jnlab/metric_space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "jnlab/numeric.hpp"

namespace jnlab {

bool PointSet::intersects(const PointSet& o) const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & o.words_[w]) != 0) return true;
  }
  return false;
}

bool PointSet::subset_of(const PointSet& o) const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & ~o.words_[w]) != 0) return false;
  }
  return true;
}

std::size_t PointSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::optional<std::size_t> PointSet::first_common(const PointSet& o) const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    const std::uint64_t both = words_[w] & o.words_[w];
    if (both != 0) return w * 64 + static_cast<std::size_t>(std::countr_zero(both));
  }
  return std::nullopt;
}

PointSet& PointSet::operator|=(const PointSet& o) {
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= o.words_[w];
  return *this;
}

namespace {

std::string triple(std::size_t i, std::size_t j, std::size_t k) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")";
}

}  // namespace

MetricMeasureSpace::MetricMeasureSpace(std::vector<std::vector<double>> points, std::vector<double> metric,
                                       std::vector<double> weights)
    : points_(std::move(points)), metric_(std::move(metric)), weights_(std::move(weights)) {
  const std::size_t m = weights_.size();
  if (m == 0) throw std::invalid_argument("metric space: at least one point is required");
  if (metric_.size() != m * m) {
    throw std::invalid_argument("metric space: distance matrix has " + std::to_string(metric_.size()) +
                                " entries, expected " + std::to_string(m * m));
  }
  if (!points_.empty() && points_.size() != m) throw std::invalid_argument("metric space: point count differs from weights");
  for (std::size_t i = 0; i < m; ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw std::invalid_argument("metric space: weight of point " + std::to_string(i) + " must be positive and finite");
    }
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = distance(i, j);
      if (!std::isfinite(d) || d < 0.0) {
        throw std::invalid_argument("metric space: d(" + std::to_string(i) + "," + std::to_string(j) +
                                    ") is negative or not finite");
      }
      if (i == j && d != 0.0) throw std::invalid_argument("metric space: d(" + std::to_string(i) + "," + std::to_string(i) + ") != 0");
      if (i != j && d == 0.0) {
        throw std::invalid_argument("metric space: distinct points " + std::to_string(i) + " and " + std::to_string(j) +
                                    " are at distance 0");
      }
      if (d != distance(j, i)) {
        throw std::invalid_argument("metric space: asymmetric distances d(" + std::to_string(i) + "," +
                                    std::to_string(j) + ") != d(" + std::to_string(j) + "," + std::to_string(i) + ")");
      }
      scale = std::max(scale, d);
    }
  }
  const double slack = 1e-12 * scale;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double dij = distance(i, j);
      for (std::size_t k = 0; k < m; ++k) {
        if (distance(i, k) > dij + distance(j, k) + slack) {
          throw std::invalid_argument("metric space: triangle inequality fails for triple " + triple(i, j, k) + ": d(" +
                                      std::to_string(i) + "," + std::to_string(k) + ") = " +
                                      format_double(distance(i, k)) + " > " + format_double(dij + distance(j, k)));
        }
      }
    }
  }
  diameter_ = scale;
  total_ = compensated_sum(weights_);

  order_.resize(m * m);
  shell_index_.resize(m * m);
  shells_.resize(m);
  shell_end_.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    auto* ord = order_.data() + c * m;
    std::iota(ord, ord + m, std::size_t{0});
    std::sort(ord, ord + m, [&](std::size_t a, std::size_t b) {
      const double da = distance(c, a);
      const double db = distance(c, b);
      return da < db || (da == db && a < b);
    });
    for (std::size_t t = 0; t < m; ++t) {
      const double d = distance(c, ord[t]);
      if (shells_[c].empty() || d != shells_[c].back()) {
        if (!shells_[c].empty()) shell_end_[c].push_back(t);
        shells_[c].push_back(d);
      }
      shell_index_[c * m + ord[t]] = shells_[c].size() - 1;
    }
    shell_end_[c].push_back(m);
  }
  doubling_ = jnlab::doubling_constant(*this);
}

std::span<const std::size_t> MetricMeasureSpace::neighbors(std::size_t c) const {
  return {order_.data() + c * size(), size()};
}

std::span<const double> MetricMeasureSpace::shells(std::size_t c) const { return shells_[c]; }

std::size_t MetricMeasureSpace::shell_end(std::size_t c, std::size_t k) const { return shell_end_[c][k]; }

std::size_t MetricMeasureSpace::count_within(std::size_t c, double r) const {
  const auto& sh = shells_[c];
  const auto it = std::lower_bound(sh.begin(), sh.end(), r);
  if (it == sh.begin()) return 0;
  return shell_end_[c][static_cast<std::size_t>(it - sh.begin()) - 1];
}

std::vector<double> MetricMeasureSpace::critical_radii(std::size_t c) const {
  const auto& sh = shells_[c];
  std::vector<double> r;
  r.reserve(sh.size());
  for (std::size_t k = 0; k + 1 < sh.size(); ++k) r.push_back(0.5 * (sh[k] + sh[k + 1]));
  r.push_back(diameter_ + 1.0);
  return r;
}

std::vector<std::size_t> MetricMeasureSpace::members(const Ball& b) const {
  if (b.center >= size()) throw std::invalid_argument("ball center out of range");
  std::vector<std::size_t> out;
  for (std::size_t y = 0; y < size(); ++y) {
    if (contains(b, y)) out.push_back(y);
  }
  return out;
}

PointSet MetricMeasureSpace::member_set(const Ball& b) const {
  if (b.center >= size()) throw std::invalid_argument("ball center out of range");
  PointSet s(size());
  const auto nb = neighbors(b.center);
  const std::size_t cnt = count_within(b.center, b.radius);
  for (std::size_t t = 0; t < cnt; ++t) s.set(nb[t]);
  return s;
}

double MetricMeasureSpace::measure(const Ball& b) const {
  NeumaierSum s;
  for (std::size_t y : members(b)) s.add(weights_[y]);
  return s.value();
}

double MetricMeasureSpace::measure(const PointSet& set) const {
  NeumaierSum s;
  for (std::size_t y = 0; y < size(); ++y) {
    if (set.test(y)) s.add(weights_[y]);
  }
  return s.value();
}

double MetricMeasureSpace::average(std::span<const double> f, const Ball& b) const {
  NeumaierSum num;
  NeumaierSum den;
  for (std::size_t y : members(b)) {
    num.add(weights_[y] * f[y]);
    den.add(weights_[y]);
  }
  return num.value() / den.value();
}

double MetricMeasureSpace::mean_oscillation(std::span<const double> f, const Ball& b) const {
  const double mean = average(f, b);
  NeumaierSum num;
  NeumaierSum den;
  for (std::size_t y : members(b)) {
    num.add(weights_[y] * std::abs(f[y] - mean));
    den.add(weights_[y]);
  }
  return num.value() / den.value();
}

double MetricMeasureSpace::integral(std::span<const double> f, const PointSet& s) const {
  NeumaierSum num;
  for (std::size_t y = 0; y < size(); ++y) {
    if (s.test(y)) num.add(weights_[y] * f[y]);
  }
  return num.value();
}

MetricMeasureSpace build_space(std::vector<std::vector<double>> points, std::vector<double> metric,
                               std::vector<double> weights) {
  return MetricMeasureSpace(std::move(points), std::move(metric), std::move(weights));
}

static double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return std::sqrt(s);
}

MetricMeasureSpace build_euclidean_space(std::vector<std::vector<double>> points, std::vector<double> weights) {
  const std::size_t m = points.size();
  std::vector<double> metric(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (points[i].size() != points[0].size()) throw std::invalid_argument("points have mixed dimensions");
    for (std::size_t j = 0; j < m; ++j) metric[i * m + j] = euclidean(points[i], points[j]);
  }
  return MetricMeasureSpace(std::move(points), std::move(metric), std::move(weights));
}

double doubling_constant(const MetricMeasureSpace& space) {
  const std::size_t m = space.size();
  double best = 1.0;
  std::vector<double> prefix(m + 1);
  for (std::size_t c = 0; c < m; ++c) {
    const auto nb = space.neighbors(c);
    NeumaierSum run;
    prefix[0] = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      run.add(space.weight(nb[t]));
      prefix[t + 1] = run.value();
    }
    const auto sh = space.shells(c);
    for (std::size_t k = 0; k + 1 < sh.size(); ++k) {
      const double inner = prefix[space.shell_end(c, k)];
      const double outer = prefix[space.count_within(c, 2.0 * sh[k + 1])];
      best = std::max(best, outer / inner);
    }
  }
  return best;
}

std::vector<Ball> realized_balls(const MetricMeasureSpace& space) {
  std::vector<Ball> out;
  for (std::size_t c = 0; c < space.size(); ++c) {
    for (double r : space.critical_radii(c)) out.push_back(Ball{c, r});
  }
  return out;
}

VitaliResult vitali_select(const MetricMeasureSpace& space, std::span<const Ball> balls) {
  if (balls.empty()) throw std::invalid_argument("vitali_subcover: at least one ball is required");
  std::vector<PointSet> sets;
  sets.reserve(balls.size());
  for (const auto& b : balls) {
    if (!(b.radius > 0.0)) throw std::invalid_argument("vitali_subcover: radii must be positive");
    sets.push_back(space.member_set(b));
  }
  std::vector<std::size_t> order(balls.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return balls[a].radius > balls[b].radius; });

  VitaliResult res;
  res.absorbed_by.assign(balls.size(), balls.size());
  PointSet taken(space.size());
  for (std::size_t i : order) {
    if (!sets[i].intersects(taken)) {
      res.kept.push_back(i);
      res.absorbed_by[i] = i;
      taken |= sets[i];
      continue;
    }
    for (std::size_t j : res.kept) {
      if (sets[i].intersects(sets[j])) {
        res.absorbed_by[i] = j;
        break;
      }
    }
  }

  for (std::size_t a = 0; a < res.kept.size(); ++a) {
    for (std::size_t b = a + 1; b < res.kept.size(); ++b) {
      if (sets[res.kept[a]].intersects(sets[res.kept[b]])) {
        throw std::logic_error("vitali_subcover: kept balls " + std::to_string(res.kept[a]) + " and " +
                               std::to_string(res.kept[b]) + " intersect");
      }
    }
  }
  PointSet covered(space.size());
  for (std::size_t j : res.kept) covered |= space.member_set(balls[j].dilate(5.0));
  for (std::size_t i = 0; i < balls.size(); ++i) {
    if (!sets[i].subset_of(covered)) {
      throw std::logic_error("vitali_subcover: ball " + std::to_string(i) + " is not covered by the kept 5-dilates");
    }
  }
  return res;
}

std::vector<std::size_t> vitali_subcover(const MetricMeasureSpace& space, std::span<const Ball> balls) {
  return vitali_select(space, balls).kept;
}

namespace {

struct Candidate {
  double value;
  std::size_t shell;
  std::size_t center;
  double radius;
};

// a beats b: larger average, then smaller radius, then smaller center.
bool beats(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.radius != b.radius) return a.radius < b.radius;
  return a.center < b.center;
}

// For each center, best[k] = best realized ball among shells >= k that is allowed. Averages come from
// prefix sums along the neighbour order.
std::vector<std::vector<std::optional<Candidate>>> suffix_best(const MetricMeasureSpace& space,
                                                               std::span<const double> f,
                                                               const PointSet* inside) {
  const std::size_t m = space.size();
  std::vector<std::vector<std::optional<Candidate>>> best(m);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t cc = 0; cc < static_cast<std::int64_t>(m); ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    const auto nb = space.neighbors(c);
    const auto radii = space.critical_radii(c);
    std::size_t first_out = m;
    if (inside != nullptr) {
      for (std::size_t t = 0; t < m; ++t) {
        if (!inside->test(nb[t])) {
          first_out = t;
          break;
        }
      }
    }
    std::vector<double> avg(radii.size());
    NeumaierSum num;
    NeumaierSum den;
    std::size_t t = 0;
    for (std::size_t k = 0; k < radii.size(); ++k) {
      const std::size_t end = space.shell_end(c, k);
      for (; t < end; ++t) {
        num.add(space.weight(nb[t]) * f[nb[t]]);
        den.add(space.weight(nb[t]));
      }
      avg[k] = num.value() / den.value();
    }
    auto& row = best[c];
    row.assign(radii.size(), std::nullopt);
    std::optional<Candidate> run;
    for (std::size_t k = radii.size(); k-- > 0;) {
      if (space.shell_end(c, k) <= first_out) {
        const Candidate here{avg[k], k, c, radii[k]};
        if (!run || !beats(*run, here)) run = here;
      }
      row[k] = run;
    }
  }
  return best;
}

std::vector<std::optional<MaximalWitness>> maximal_witnesses(const MetricMeasureSpace& space,
                                                             std::span<const double> f, const PointSet* inside) {
  const std::size_t m = space.size();
  if (f.size() != m) throw std::invalid_argument("function has " + std::to_string(f.size()) + " values for " + std::to_string(m) + " points");
  const auto best = suffix_best(space, f, inside);
  std::vector<std::optional<MaximalWitness>> out(m);
#pragma omp parallel for schedule(static)
  for (std::int64_t xx = 0; xx < static_cast<std::int64_t>(m); ++xx) {
    const auto x = static_cast<std::size_t>(xx);
    if (inside != nullptr && !inside->test(x)) continue;
    std::optional<Candidate> win;
    for (std::size_t c = 0; c < m; ++c) {
      const auto& cand = best[c][space.shell_of(c, x)];
      if (cand && (!win || beats(*cand, *win))) win = cand;
    }
    if (win) out[x] = MaximalWitness{win->value, Ball{win->center, win->radius}};
  }
  return out;
}

}  // namespace

std::vector<std::optional<MaximalWitness>> restricted_maximal_witnesses(const MetricMeasureSpace& space,
                                                                        std::span<const double> f, const Ball& b0) {
  const PointSet inside = space.member_set(b0);
  return maximal_witnesses(space, f, &inside);
}

std::vector<double> hl_maximal_restricted(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0) {
  const auto w = restricted_maximal_witnesses(space, f, b0);
  std::vector<double> out(w.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t x = 0; x < w.size(); ++x) {
    if (w[x]) out[x] = w[x]->value;
  }
  return out;
}

std::vector<double> global_maximal(const MetricMeasureSpace& space, std::span<const double> f) {
  std::vector<double> absf(f.begin(), f.end());
  for (double& v : absf) v = std::abs(v);
  const auto w = maximal_witnesses(space, absf, nullptr);
  std::vector<double> out(w.size());
  for (std::size_t x = 0; x < w.size(); ++x) out[x] = w[x]->value;
  return out;
}

double strong_type_ratio(const MetricMeasureSpace& space, std::span<const double> f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("strong_type_ratio: p must be >= 1");
  const auto mf = global_maximal(space, f);
  NeumaierSum num;
  NeumaierSum den;
  for (std::size_t x = 0; x < space.size(); ++x) {
    num.add(space.weight(x) * std::pow(mf[x], p));
    den.add(space.weight(x) * std::pow(std::abs(f[x]), p));
  }
  if (den.value() == 0.0) return 0.0;
  return std::pow(num.value() / den.value(), 1.0 / p);
}

BallFamily check_admissible(const MetricMeasureSpace& space, const Ball& b0, BallFamily family) {
  const PointSet inner = space.member_set(b0);
  const PointSet big = space.member_set(b0.dilate(11.0));
  double reach = 0.0;
  for (std::size_t y = 0; y < space.size(); ++y) reach = std::max(reach, space.distance(b0.center, y));
  family.ambient_truncated = 11.0 * b0.radius > reach;
  family.uncentered.clear();
  family.uncontained.clear();
  family.overlap_pair.reset();
  family.overlap_point.reset();

  std::vector<PointSet> fifths;
  fifths.reserve(family.balls.size());
  for (std::size_t i = 0; i < family.balls.size(); ++i) {
    const Ball& b = family.balls[i];
    if (b.center >= space.size() || !(b.radius > 0.0)) throw std::invalid_argument("check_admissible: invalid ball");
    if (!inner.test(b.center)) family.uncentered.push_back(i);
    if (!space.member_set(b).subset_of(big)) family.uncontained.push_back(i);
    fifths.push_back(space.member_set(b.dilate(0.2)));
  }
  for (std::size_t i = 0; i < fifths.size() && !family.overlap_pair; ++i) {
    for (std::size_t j = i + 1; j < fifths.size(); ++j) {
      if (auto y = fifths[i].first_common(fifths[j])) {
        family.overlap_pair = std::make_pair(i, j);
        family.overlap_point = *y;
        break;
      }
    }
  }
  family.centered = family.uncentered.empty();
  family.contained = family.uncontained.empty();
  family.fifths_disjoint = !family.overlap_pair.has_value();
  family.admissible = family.centered && family.contained && family.fifths_disjoint;
  return family;
}

BallFamily check_admissible(const MetricMeasureSpace& space, const Ball& b0, std::vector<Ball> balls) {
  BallFamily fam;
  fam.balls = std::move(balls);
  return check_admissible(space, b0, std::move(fam));
}

double jn_term(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b, double p) {
  return space.measure(b) * std::pow(space.mean_oscillation(f, b), p);
}

namespace {

class FamilySearch {
 public:
  FamilySearch(std::vector<double> terms, std::vector<PointSet> conflicts, std::size_t budget)
      : terms_(std::move(terms)), conflicts_(std::move(conflicts)), budget_(budget) {}

  [[nodiscard]] bool exhausted() const { return evaluations_ >= budget_; }
  [[nodiscard]] std::size_t evaluations() const { return evaluations_; }
  [[nodiscard]] double best_sum() const { return best_sum_; }
  [[nodiscard]] const std::vector<std::size_t>& best() const { return best_; }

  // Returns false once the budget is spent.
  bool evaluate(std::vector<std::size_t> family) {
    if (exhausted()) return false;
    ++evaluations_;
    std::sort(family.begin(), family.end());
    double s = 0.0;
    for (std::size_t i : family) s += terms_[i];
    if (s > best_sum_ || (s == best_sum_ && family < best_)) {
      best_sum_ = s;
      best_ = std::move(family);
    }
    return true;
  }

  [[nodiscard]] bool independent_of(std::size_t i, const std::vector<std::size_t>& family) const {
    for (std::size_t j : family) {
      if (conflicts_[i].test(j)) return false;
    }
    return true;
  }

  // Every independent set in lexicographic order; true when the enumeration finished within budget.
  bool enumerate_all() {
    std::vector<std::size_t> current;
    return dfs(0, current);
  }

  std::vector<std::size_t> greedy(const std::vector<std::size_t>& order) const {
    std::vector<std::size_t> chosen;
    for (std::size_t i : order) {
      if (independent_of(i, chosen)) chosen.push_back(i);
    }
    return chosen;
  }

  void local_search(std::mt19937_64& rng) {
    std::vector<std::size_t> order(terms_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    bool improved = true;
    while (improved && !exhausted()) {
      improved = false;
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t i : order) {
        if (std::find(best_.begin(), best_.end(), i) != best_.end()) continue;
        std::vector<std::size_t> next;
        for (std::size_t j : best_) {
          if (!conflicts_[i].test(j)) next.push_back(j);
        }
        next.push_back(i);
        const double before = best_sum_;
        if (!evaluate(std::move(next))) return;
        if (best_sum_ > before) {
          improved = true;
          break;
        }
      }
    }
  }

 private:
  bool dfs(std::size_t from, std::vector<std::size_t>& current) {
    if (!evaluate(current)) return false;
    for (std::size_t i = from; i < terms_.size(); ++i) {
      if (!independent_of(i, current)) continue;
      current.push_back(i);
      const bool ok = dfs(i + 1, current);
      current.pop_back();
      if (!ok) return false;
    }
    return true;
  }

  std::vector<double> terms_;
  std::vector<PointSet> conflicts_;
  std::size_t budget_;
  std::size_t evaluations_ = 0;
  double best_sum_ = 0.0;
  std::vector<std::size_t> best_;
};

}  // namespace

MetricJnResult jnp_metric_lower(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0, double p,
                                std::size_t budget, std::uint64_t seed) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("jnp_metric_lower: p must be a finite number > 1");
  if (f.size() != space.size()) throw std::invalid_argument("jnp_metric_lower: function size differs from the space");
  const PointSet inner = space.member_set(b0);
  const PointSet big = space.member_set(b0.dilate(11.0));

  std::vector<Ball> cand;
  std::vector<double> terms;
  for (std::size_t c = 0; c < space.size(); ++c) {
    if (!inner.test(c)) continue;
    for (double r : space.critical_radii(c)) {
      const Ball b{c, r};
      if (!space.member_set(b).subset_of(big)) continue;
      const double t = jn_term(space, f, b, p);
      if (t > 0.0) {
        cand.push_back(b);
        terms.push_back(t);
      }
    }
  }
  const std::size_t n = cand.size();
  std::vector<PointSet> fifths;
  fifths.reserve(n);
  for (const auto& b : cand) fifths.push_back(space.member_set(b.dilate(0.2)));
  std::vector<PointSet> conflicts(n, PointSet(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (fifths[i].intersects(fifths[j])) conflicts[i].set(j);
    }
  }

  FamilySearch search(terms, conflicts, budget);
  MetricJnResult res;
  res.candidates = n;
  if (n <= kExhaustiveCandidateLimit) {
    res.exhaustive = search.enumerate_all();
  } else {
    for (std::size_t i = 0; i < n && !search.exhausted(); ++i) search.evaluate({i});

    // Vitali-style selections among candidates up to a radius scale.
    std::vector<double> radii;
    for (const auto& b : cand) radii.push_back(b.radius);
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    constexpr int kScales = 6;
    for (int s = 1; s <= kScales && !search.exhausted(); ++s) {
      const double cap = radii[(radii.size() - 1) * static_cast<std::size_t>(s) / kScales];
      std::vector<std::size_t> order;
      for (std::size_t i = 0; i < n; ++i) {
        if (cand[i].radius <= cap) order.push_back(i);
      }
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cand[a].radius > cand[b].radius; });
      search.evaluate(search.greedy(order));
    }

    std::vector<std::size_t> by_weight(n);
    std::iota(by_weight.begin(), by_weight.end(), std::size_t{0});
    std::stable_sort(by_weight.begin(), by_weight.end(), [&](std::size_t a, std::size_t b) { return terms[a] > terms[b]; });
    search.evaluate(search.greedy(by_weight));

    std::mt19937_64 rng(seed);
    search.local_search(rng);
  }

  std::vector<Ball> chosen;
  for (std::size_t i : search.best()) chosen.push_back(cand[i]);
  res.sum = search.best_sum();
  res.value = std::pow(res.sum, 1.0 / p);
  res.evaluations = search.evaluations();
  res.family = check_admissible(space, b0, std::move(chosen));
  if (!res.family.admissible) throw std::logic_error("jnp_metric_lower: search returned an inadmissible family");
  return res;
}

double bmo_norm_metric(const MetricMeasureSpace& space, std::span<const double> f) {
  const std::size_t m = space.size();
  if (f.size() != m) throw std::invalid_argument("bmo_norm_metric: function size differs from the space");
  std::vector<double> per_center(m, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t cc = 0; cc < static_cast<std::int64_t>(m); ++cc) {
    const auto c = static_cast<std::size_t>(cc);
    const auto nb = space.neighbors(c);
    NeumaierSum num;
    NeumaierSum den;
    std::size_t t = 0;
    double best = 0.0;
    for (std::size_t k = 0; k < space.shells(c).size(); ++k) {
      const std::size_t end = space.shell_end(c, k);
      for (; t < end; ++t) {
        num.add(space.weight(nb[t]) * f[nb[t]]);
        den.add(space.weight(nb[t]));
      }
      const double mean = num.value() / den.value();
      NeumaierSum osc;
      for (std::size_t u = 0; u < end; ++u) osc.add(space.weight(nb[u]) * std::abs(f[nb[u]] - mean));
      best = std::max(best, osc.value() / den.value());
    }
    per_center[c] = best;
  }
  return *std::max_element(per_center.begin(), per_center.end());
}

void write_space_csv(std::ostream& out, const MetricMeasureSpace& space) {
  const std::size_t m = space.size();
  // Coordinates only reload to the same space when the metric is their Euclidean distance.
  bool euclidean_metric = !space.points().empty();
  for (std::size_t i = 0; i < m && euclidean_metric; ++i) {
    for (std::size_t j = 0; j < m && euclidean_metric; ++j) {
      euclidean_metric = space.distance(i, j) == euclidean(space.points()[i], space.points()[j]);
    }
  }
  if (euclidean_metric) {
    const std::size_t dim = space.points()[0].size();
    for (std::size_t d = 0; d < dim; ++d) out << 'x' << d << ',';
    out << "weight\n";
    for (std::size_t i = 0; i < m; ++i) {
      for (double x : space.points()[i]) out << format_double(x) << ',';
      out << format_double(space.weight(i)) << '\n';
    }
    return;
  }
  for (std::size_t d = 0; d < m; ++d) out << 'd' << d << ',';
  out << "weight\n";
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) out << format_double(space.distance(i, j)) << ',';
    out << format_double(space.weight(i)) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trimmed(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  while (!s.empty() && s.front() == ' ') s.erase(s.begin());
  return s;
}

}  // namespace

MetricMeasureSpace read_space_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  auto fail = [&](const std::string& what) {
    return std::runtime_error("space CSV, line " + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line)) throw fail("missing header");
  const auto header = split_csv(trimmed(line));
  if (header.size() < 2 || trimmed(header.back()) != "weight") throw fail("header must end with 'weight'");
  const std::size_t cols = header.size() - 1;
  const bool coords = trimmed(header[0]) == "x0";
  if (!coords && trimmed(header[0]) != "d0") throw fail("header must start with x0 (coordinates) or d0 (distances)");
  for (std::size_t d = 0; d < cols; ++d) {
    const std::string want = std::string(coords ? "x" : "d") + std::to_string(d);
    if (trimmed(header[d]) != want) throw fail("expected column '" + want + "'");
  }
  std::vector<std::vector<double>> rows;
  std::vector<double> weights;
  while (std::getline(in, line)) {
    ++line_no;
    line = trimmed(line);
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != cols + 1) {
      throw fail("expected " + std::to_string(cols + 1) + " fields, found " + std::to_string(f.size()));
    }
    std::vector<double> row(cols);
    try {
      for (std::size_t d = 0; d < cols; ++d) row[d] = parse_double(f[d]);
      weights.push_back(parse_double(f[cols]));
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
    rows.push_back(std::move(row));
  }
  try {
    if (coords) return build_euclidean_space(std::move(rows), std::move(weights));
    if (rows.size() != cols) throw std::invalid_argument("distance matrix needs " + std::to_string(cols) + " rows");
    std::vector<double> metric;
    metric.reserve(cols * cols);
    for (const auto& r : rows) metric.insert(metric.end(), r.begin(), r.end());
    return build_space({}, std::move(metric), std::move(weights));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("space CSV: ") + e.what());
  }
}

void write_point_function_csv(std::ostream& out, std::span<const double> f) {
  out << "index,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) out << i << ',' << format_double(f[i]) << '\n';
}

std::vector<double> read_point_function_csv(std::istream& in, std::size_t expected_size) {
  std::string line;
  std::size_t line_no = 1;
  auto fail = [&](const std::string& what) {
    return std::runtime_error("function CSV, line " + std::to_string(line_no) + ": " + what);
  };
  if (!std::getline(in, line) || trimmed(line) != "index,value") throw fail("header must be 'index,value'");
  std::vector<double> f(expected_size, 0.0);
  std::vector<bool> seen(expected_size, false);
  while (std::getline(in, line)) {
    ++line_no;
    line = trimmed(line);
    if (line.empty()) continue;
    const auto parts = split_csv(line);
    if (parts.size() != 2) throw fail("expected 'index,value'");
    double idx = 0.0;
    double v = 0.0;
    try {
      idx = parse_double(parts[0]);
      v = parse_double(parts[1]);
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
    if (idx < 0 || idx != std::floor(idx) || idx >= static_cast<double>(expected_size)) {
      throw fail("index " + parts[0] + " outside [0, " + std::to_string(expected_size) + ")");
    }
    const auto i = static_cast<std::size_t>(idx);
    if (seen[i]) throw fail("duplicate index " + std::to_string(i));
    if (!std::isfinite(v)) throw fail("non-finite value");
    seen[i] = true;
    f[i] = v;
  }
  for (std::size_t i = 0; i < expected_size; ++i) {
    if (!seen[i]) throw fail("missing value for index " + std::to_string(i));
  }
  return f;
}

}  // namespace jnlab
