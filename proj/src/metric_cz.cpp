#include "jnlab/metric_cz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "jnlab/numeric.hpp"

namespace jnlab {

namespace {

constexpr int kMaxDilationSteps = 60;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

bool above_with_slack(double a, double b) { return a > b - kVerifySlack * std::max(1.0, std::abs(b)); }

double pow5(int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= 5.0;
  return r;
}

std::string ball_text(const Ball& b) {
  return "B(" + std::to_string(b.center) + ", " + format_double(b.radius) + ")";
}

void require_size(const MetricMeasureSpace& space, std::span<const double> f) {
  if (f.size() != space.size()) {
    throw std::invalid_argument("function has " + std::to_string(f.size()) + " values for " +
                                std::to_string(space.size()) + " points");
  }
}

void require_cz_inputs(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0, double lambda) {
  require_size(space, f);
  if (b0.center >= space.size() || !(b0.radius > 0.0)) throw std::invalid_argument("B0 must be a ball of the space");
  const PointSet big = space.member_set(b0.dilate(11.0));
  for (std::size_t y = 0; y < space.size(); ++y) {
    if (big.test(y) && !(f[y] >= 0.0)) {
      throw std::invalid_argument("f must be nonnegative on 11B0; f(" + std::to_string(y) + ") = " + format_double(f[y]));
    }
  }
  const double thr = cz_threshold(space, f, b0);
  if (!(lambda >= 0.0) || !leq_with_slack(thr, lambda)) {
    throw std::invalid_argument("level " + format_double(lambda) + " is below the threshold " + format_double(thr));
  }
}

struct LevelBuild {
  CzBallCover cover;
  std::vector<Ball> candidates;
  std::vector<std::size_t> candidate_of;  // per point
  std::vector<int> exponent_of;           // per point, 0 when not in the level set
  VitaliResult vitali;
  std::vector<std::size_t> position_of;   // candidate index -> position among the cover's balls
};

LevelBuild build_level(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0,
                       const std::vector<std::optional<MaximalWitness>>& witness, double lambda) {
  const std::size_t m = space.size();
  LevelBuild lb;
  lb.cover.level = lambda;
  lb.candidate_of.assign(m, kNone);
  lb.exponent_of.assign(m, 0);
  std::map<std::pair<std::size_t, double>, std::size_t> seen;
  std::vector<std::size_t> first_seed;
  std::vector<int> first_exp;
  for (std::size_t x = 0; x < m; ++x) {
    if (!witness[x] || !(witness[x]->value > lambda)) continue;
    const Ball bx = witness[x]->ball;
    int n = 1;
    while (space.average(f, bx.dilate(pow5(n))) > lambda) {
      if (++n > kMaxDilationSteps) throw CzInvariantError("dilates of " + ball_text(bx) + " never drop to the level");
    }
    const Ball cand = bx.dilate(pow5(n - 1));
    lb.exponent_of[x] = n;
    const auto key = std::make_pair(cand.center, cand.radius);
    auto it = seen.find(key);
    if (it == seen.end()) {
      it = seen.emplace(key, lb.candidates.size()).first;
      lb.candidates.push_back(cand);
      first_seed.push_back(x);
      first_exp.push_back(n);
    }
    lb.candidate_of[x] = it->second;
  }

  const PointSet inner = space.member_set(b0);
  lb.cover.degenerate_dilates = space.member_set(b0.dilate(11.0)) == inner;
  lb.position_of.assign(lb.candidates.size(), kNone);
  PointSet covered(m);
  if (!lb.candidates.empty()) {
    lb.vitali = vitali_select(space, lb.candidates);
    for (std::size_t k = 0; k < lb.vitali.kept.size(); ++k) {
      const std::size_t idx = lb.vitali.kept[k];
      const Ball& b = lb.candidates[idx];
      lb.position_of[idx] = k;
      lb.cover.balls.push_back(b);
      lb.cover.seeds.push_back(first_seed[idx]);
      lb.cover.exponents.push_back(first_exp[idx]);
      lb.cover.ball_averages.push_back(space.average(f, b));
      lb.cover.dilate_averages.push_back(space.average(f, b.dilate(5.0)));
      covered |= space.member_set(b.dilate(5.0));
    }
  }
  lb.cover.residual = PointSet(m);
  for (std::size_t y = 0; y < m; ++y) {
    if (inner.test(y) && !covered.test(y)) lb.cover.residual.set(y);
  }
  const std::string bad = cz_cover_violation(space, f, b0, lb.cover);
  if (!bad.empty()) throw CzInvariantError("cover at level " + format_double(lambda) + ": " + bad);
  return lb;
}

double sum_measures(const MetricMeasureSpace& space, const CzBallCover& cover) {
  NeumaierSum s;
  for (const auto& b : cover.balls) s.add(space.measure(b));
  return s.value();
}

std::vector<double> centered_abs(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0,
                                 double scale) {
  const double mean = space.average(f, b0);
  std::vector<double> g(f.size());
  for (std::size_t y = 0; y < f.size(); ++y) g[y] = std::abs((f[y] - mean) / scale);
  return g;
}

double measure_above(const MetricMeasureSpace& space, const PointSet& inner, std::span<const double> g, double level) {
  NeumaierSum s;
  for (std::size_t y = 0; y < space.size(); ++y) {
    if (inner.test(y) && g[y] > level) s.add(space.weight(y));
  }
  return s.value();
}

std::vector<double> log_sweep(double lo, double hi, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < points; ++i) out[i] = std::exp(a + (b - a) * i / (points - 1));
  return out;
}

constexpr int kSweep = 60;

}  // namespace

double cz_threshold(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0) {
  require_size(space, f);
  return space.integral(f, space.member_set(b0.dilate(11.0))) / space.measure(b0);
}

std::vector<std::optional<MaximalWitness>> cz_witness_balls(const MetricMeasureSpace& space, std::span<const double> f,
                                                            const Ball& b0) {
  auto w = restricted_maximal_witnesses(space, f, b0);
  const double cap = 2.0 * b0.radius;
  for (auto& entry : w) {
    if (!entry || entry->ball.radius <= cap) continue;
    const Ball clamped{entry->ball.center, cap};
    if (!(space.member_set(clamped) == space.member_set(entry->ball))) {
      throw CzInvariantError("capping " + ball_text(entry->ball) + " at 2R changes its members");
    }
    entry->ball = clamped;
  }
  return w;
}

std::string cz_cover_violation(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0,
                               const CzBallCover& cover) {
  const double lambda = cover.level;
  const double c3 = std::pow(space.doubling_constant(), 3);
  const PointSet inner = space.member_set(b0);
  const PointSet big = space.member_set(b0.dilate(11.0));
  std::vector<PointSet> sets;
  PointSet covered(space.size());
  for (const auto& b : cover.balls) {
    const std::string name = ball_text(b);
    if (!inner.test(b.center)) return name + " is not centered in B0";
    PointSet s = space.member_set(b);
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (s.intersects(sets[j])) return name + " meets " + ball_text(cover.balls[j]);
    }
    const PointSet five = space.member_set(b.dilate(5.0));
    if (!five.subset_of(big)) return "5" + name + " leaves 11B0";
    covered |= five;
    const double a = space.average(f, b);
    const double d = space.average(f, b.dilate(5.0));
    if (!above_with_slack(a, lambda) || !leq_with_slack(a, c3 * lambda)) {
      return name + " average " + format_double(a) + " outside (lambda, c^3 lambda]";
    }
    if (!above_with_slack(d, lambda / c3) || !leq_with_slack(d, lambda)) {
      return "5" + name + " average " + format_double(d) + " outside (lambda/c^3, lambda]";
    }
    sets.push_back(std::move(s));
  }
  for (std::size_t y = 0; y < space.size(); ++y) {
    if (!inner.test(y) || covered.test(y)) continue;
    if (!leq_with_slack(f[y], lambda)) return "f(" + std::to_string(y) + ") = " + format_double(f[y]) + " off the 5-dilates";
  }
  return {};
}

CzBallCover cz_balls(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0, double lambda) {
  require_cz_inputs(space, f, b0, lambda);
  const auto w = cz_witness_balls(space, f, b0);
  return build_level(space, f, b0, w, lambda).cover;
}

NestedCovers nested_cz(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0,
                       std::span<const double> levels) {
  if (levels.empty()) throw std::invalid_argument("nested_cz: at least one level is required");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (i > 0 && levels[i] < levels[i - 1]) throw std::invalid_argument("nested_cz: levels must be nondecreasing");
  }
  require_cz_inputs(space, f, b0, levels.front());
  const auto w = cz_witness_balls(space, f, b0);
  std::vector<LevelBuild> builds;
  builds.reserve(levels.size());
  for (double l : levels) builds.push_back(build_level(space, f, b0, w, l));

  NestedCovers out;
  out.levels.assign(levels.begin(), levels.end());
  for (std::size_t n = 0; n + 1 < builds.size(); ++n) {
    const LevelBuild& lo = builds[n];
    const LevelBuild& hi = builds[n + 1];
    std::vector<std::size_t> map(hi.cover.balls.size(), kNone);
    for (std::size_t i = 0; i < hi.cover.balls.size(); ++i) {
      const std::size_t x = hi.cover.seeds[i];
      if (lo.exponent_of[x] < hi.exponent_of[x]) {
        throw CzInvariantError("stopping exponent grows with the level at point " + std::to_string(x));
      }
      const PointSet inside = space.member_set(hi.cover.balls[i]);
      // Same center, larger radius at the lower level; Vitali places that ball inside a kept 5-dilate.
      const std::size_t cand = lo.candidate_of[x];
      if (cand != kNone) {
        const std::size_t j = lo.position_of[lo.vitali.absorbed_by[cand]];
        if (j != kNone && inside.subset_of(space.member_set(lo.cover.balls[j].dilate(5.0)))) map[i] = j;
      }
      for (std::size_t j = 0; j < lo.cover.balls.size() && map[i] == kNone; ++j) {
        if (inside.subset_of(space.member_set(lo.cover.balls[j].dilate(5.0)))) map[i] = j;
      }
      if (map[i] == kNone) {
        throw CzInvariantError(ball_text(hi.cover.balls[i]) + " at level " + format_double(levels[n + 1]) +
                               " lies in no 5-dilate of the previous level");
      }
    }
    out.containment.push_back(std::move(map));
  }
  for (auto& b : builds) out.covers.push_back(std::move(b.cover));
  return out;
}

double dilate_family_sum(const MetricMeasureSpace& space, std::span<const double> f, const CzBallCover& cover,
                         double p) {
  double s = 0.0;
  for (const auto& b : cover.balls) s += jn_term(space, f, b.dilate(5.0), p);
  return s;
}

CheckReport check_toiterate(const MetricMeasureSpace& space, std::span<const double> f_signed, const Ball& b0,
                            double lambda, double p) {
  require_size(space, f_signed);
  const double q = conjugate_exponent(p);
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("check_toiterate: lambda must be > 0");
  const auto g = centered_abs(space, f_signed, b0, 1.0);
  const double levels[2] = {lambda, 2.0 * lambda};
  const NestedCovers nc = nested_cz(space, g, b0, levels);
  const double lhs = sum_measures(space, nc.covers[1]);
  const double base = sum_measures(space, nc.covers[0]);
  const double S = dilate_family_sum(space, f_signed, nc.covers[0], p);
  const double K = std::pow(S, 1.0 / p);
  const double constant = std::pow(space.doubling_constant(), 3.0 / q);
  const double rhs = constant * K / lambda * std::pow(base, 1.0 / q);
  const BallFamily fam = check_admissible(space, b0, std::vector<Ball>{});
  nlohmann::json w = {{"K", K},
                      {"K_source", "dilates of the level-lambda cover"},
                      {"S", S},
                      {"c_mu", space.doubling_constant()},
                      {"q", q},
                      {"balls_lambda", nc.covers[0].balls.size()},
                      {"balls_2lambda", nc.covers[1].balls.size()},
                      {"measure_lambda", base},
                      {"ambient_truncated", fam.ambient_truncated},
                      {"degenerate_dilates", nc.covers[0].degenerate_dilates}};
  return make_report("toiterate", lambda, lhs, rhs, constant, std::move(w));
}

double mainresult_large_bound(const Constants& k, int N, double integral_11b0) {
  if (N < 0) throw std::invalid_argument("mainresult_large_bound: N must be >= 0");
  if (!k.lambda0) throw std::invalid_argument("mainresult_large_bound: lambda0 is required");
  const double l0 = *k.lambda0;
  double geo = 0.0;
  for (int i = 1; i <= N; ++i) geo += std::pow(k.q, -i);
  const double qn = std::pow(k.q, -N);
  return std::pow(k.c_mu, 3) * std::pow(k.c_mu, 3.0 * geo) * inverse_g(N, k.p) * std::pow(1.0 / l0, k.p - k.p * qn) *
         std::pow(integral_11b0 / l0, qn);
}

std::vector<CheckReport> verify_mainresult(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0,
                                           double p) {
  require_size(space, f);
  const double c = space.doubling_constant();
  const double mu0 = space.measure(b0);
  const Constants k = theorem_constants(c, p, 1, ConstantsAux{mu0, std::nullopt, std::nullopt});
  const double l0 = *k.lambda0;
  const PointSet inner = space.member_set(b0);
  const Ball big_ball = b0.dilate(11.0);
  const PointSet big = space.member_set(big_ball);
  const BallFamily flags = check_admissible(space, b0, std::vector<Ball>{});

  const double k_b0 = std::pow(jn_term(space, f, b0, p), 1.0 / p);
  const double k_11 = std::pow(jn_term(space, f, big_ball, p), 1.0 / p);
  if (k_b0 == 0.0 && k_11 == 0.0) {
    auto r = degenerate_report("mainresult", 0.0, std::pow(k.C1, p), "f is constant on 11B0");
    r.witness["K"] = 0.0;
    return {r};
  }

  constexpr int kTop = 5;  // ladder 2^n lambda0, n = 0..kTop; the sweep ends at 2^{kTop+1} lambda0
  std::vector<double> ladder;
  for (int n = 0; n <= kTop; ++n) ladder.push_back(std::ldexp(l0, n));

  // K grows until it dominates every family the bound chain uses, measured on its own normalization.
  double K = std::max(k_b0, k_11);
  std::string k_source = k_b0 >= k_11 ? "B0" : "11B0";
  std::vector<double> g;
  std::vector<double> fn;
  NestedCovers nc;
  std::vector<double> s_norm;
  for (int iter = 0;; ++iter) {
    if (iter > 200) throw std::logic_error("verify_mainresult: K did not settle");
    g = centered_abs(space, f, b0, K);
    fn.assign(f.size(), 0.0);
    const double mean = space.average(f, b0);
    for (std::size_t y = 0; y < f.size(); ++y) fn[y] = (f[y] - mean) / K;
    nc = nested_cz(space, g, b0, ladder);
    s_norm.clear();
    double worst = 0.0;
    std::size_t worst_n = 0;
    for (std::size_t n = 0; n < nc.covers.size(); ++n) {
      s_norm.push_back(dilate_family_sum(space, fn, nc.covers[n], p));
      if (s_norm.back() > worst) {
        worst = s_norm.back();
        worst_n = n;
      }
    }
    if (worst <= 1.0 + 1e-12) break;
    K *= std::pow(worst, 1.0 / p);
    k_source = "ladder level " + std::to_string(worst_n);
  }

  std::vector<CheckReport> out;
  const double integral = space.integral(g, big);
  nlohmann::json common = {{"K", K},
                           {"K_source", k_source},
                           {"c_mu", c},
                           {"lambda0", l0},
                           {"p", p},
                           {"ambient_truncated", flags.ambient_truncated},
                           {"degenerate_dilates", nc.covers[0].degenerate_dilates}};

  {
    nlohmann::json w = common;
    w["branch"] = "threshold";
    out.push_back(make_report("mainresult.threshold", l0 * K, integral / mu0, l0, k.C1, std::move(w)));
  }
  const double c3q = std::pow(c, 3.0 / k.q);
  for (int n = 0; n < kTop; ++n) {
    const double lhs = sum_measures(space, nc.covers[n + 1]);
    const double base = sum_measures(space, nc.covers[n]);
    const double kn = std::pow(s_norm[n], 1.0 / p);
    nlohmann::json w = common;
    w["branch"] = "ladder";
    w["N"] = n;
    w["S"] = s_norm[n];
    out.push_back(make_report("mainresult.ladder", ladder[n] * K, lhs, c3q * kn / ladder[n] * std::pow(base, 1.0 / k.q),
                              c3q, std::move(w)));
  }

  double gmax = 0.0;
  for (std::size_t y = 0; y < space.size(); ++y) {
    if (inner.test(y)) gmax = std::max(gmax, g[y]);
  }
  const double lo = (gmax > 0.0 ? std::min(gmax, l0) : l0) / 100.0;
  for (double lam : log_sweep(lo, std::ldexp(l0, kTop + 1), kSweep)) {
    const double lhs = measure_above(space, inner, g, lam);
    nlohmann::json w = common;
    w["lambda_normalized"] = lam;
    if (lam <= l0) {
      const double cp = std::pow(k.C1, p);
      w["branch"] = "small";
      out.push_back(make_report("mainresult", lam * K, lhs, cp / std::pow(lam, p), cp, std::move(w)));
      continue;
    }
    int N = 0;
    while (std::ldexp(l0, N + 1) < lam) ++N;
    const double rhs = mainresult_large_bound(k, N, integral);
    w["branch"] = "large";
    w["N"] = N;
    out.push_back(make_report("mainresult", lam * K, lhs, rhs, rhs / std::pow(1.0 / l0, p), std::move(w)));
  }
  return out;
}

std::vector<CheckReport> verify_bmo_jn(const MetricMeasureSpace& space, std::span<const double> f, const Ball& b0) {
  require_size(space, f);
  const double c = space.doubling_constant();
  const Constants k = theorem_constants(c, 2.0, 1);
  const double norm = bmo_norm_metric(space, f);
  if (norm == 0.0) {
    auto r = degenerate_report("bmo", 0.0, k.c1, "f is constant");
    r.witness["bmo_norm"] = 0.0;
    return {r};
  }
  const PointSet inner = space.member_set(b0);
  const PointSet big = space.member_set(b0.dilate(11.0));
  const double mu0 = space.measure(b0);
  const auto g = centered_abs(space, f, b0, norm);
  const BallFamily flags = check_admissible(space, b0, std::vector<Ball>{});
  nlohmann::json common = {{"bmo_norm", norm},
                           {"a", k.a},
                           {"c1", k.c1},
                           {"c2", k.c2},
                           {"c_mu", c},
                           {"ambient_truncated", flags.ambient_truncated},
                           {"degenerate_dilates", big == inner}};

  std::vector<CheckReport> out;
  const double thr = space.integral(g, big) / mu0;
  {
    nlohmann::json w = common;
    w["branch"] = "threshold";
    out.push_back(make_report("bmo.threshold", k.a * norm, thr, k.a, k.a, std::move(w)));
  }

  double gmax = 0.0;
  for (std::size_t y = 0; y < space.size(); ++y) {
    if (inner.test(y)) gmax = std::max(gmax, g[y]);
  }
  const double lo = (gmax > 0.0 ? std::min(gmax, k.a) : k.a) / 100.0;
  for (double lam : log_sweep(lo, 5.0 * k.a, kSweep)) {
    const double lhs = measure_above(space, inner, g, lam);
    const double rhs = k.c1 * mu0 * std::exp(-k.c2 * lam);
    nlohmann::json w = common;
    w["lambda_normalized"] = lam;
    w["branch"] = lam < k.a ? "small" : "large";
    out.push_back(make_report("bmo", lam * norm, lhs, rhs, k.c1, std::move(w)));
  }

  // Halving on the levels a, 2a, ..., 5a.
  std::vector<double> steps;
  for (int i = 1; i <= 5; ++i) steps.push_back(i * k.a);
  const NestedCovers hc = nested_cz(space, g, b0, steps);
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    nlohmann::json w = common;
    w["branch"] = "halving";
    w["gamma"] = steps[i];
    out.push_back(make_report("bmo.halving", steps[i + 1] * norm, sum_measures(space, hc.covers[i + 1]),
                              0.5 * sum_measures(space, hc.covers[i]), 0.5, std::move(w)));
  }

  // Gap inequality (lambda - gamma) sum mu(B(lambda)) <= c^3 sum mu(B(gamma)) on a ladder where covers are nonempty.
  if (thr > 0.0 && gmax > 0.0) {
    std::vector<double> gap;
    for (double lvl = 1.2 * thr; gap.size() < 12; lvl *= 1.5) {
      gap.push_back(lvl);
      if (lvl > gmax) break;
    }
    if (gap.size() >= 2) {
      const NestedCovers gc = nested_cz(space, g, b0, gap);
      const double c3 = std::pow(c, 3);
      for (std::size_t i = 0; i + 1 < gap.size(); ++i) {
        nlohmann::json w = common;
        w["branch"] = "gap";
        w["gamma"] = gap[i];
        out.push_back(make_report("bmo.gap", gap[i + 1] * norm,
                                  (gap[i + 1] - gap[i]) * sum_measures(space, gc.covers[i + 1]),
                                  c3 * sum_measures(space, gc.covers[i]), c3, std::move(w)));
      }
    }
  }
  return out;
}

}  // namespace jnlab
