// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Usage: acceptance [path-to-jnlab-cli] [scratch-dir]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "jnlab/constants.hpp"
#include "jnlab/dyadic_cz.hpp"
#include "jnlab/generators.hpp"
#include "jnlab/jn_functionals.hpp"
#include "jnlab/metric_cz.hpp"
#include "jnlab/metric_space.hpp"
#include "jnlab/numeric.hpp"
#include "oracles.hpp"

using namespace jnlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string num(double x) { return format_double(x); }

GridFunction random_grid(Rng& rng, int dim, int depth) {
  const bool martingale = rng.integer(0, 1) == 1;
  const auto seed = static_cast<std::uint64_t>(rng.integer(0, 1'000'000'000));
  return generate_function(martingale ? "random-martingale" : "random-uniform", FunctionParams{2.0, depth, dim, seed});
}

bool near(double a, double b, double rel = 1e-12) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

// ---- 1 ----
Outcome maximal_oracle() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  std::size_t compared = 0;
  for (int dim = 1; dim <= 2 && o.pass; ++dim) {
    for (int depth = 1; depth <= 8 && o.pass; ++depth) {
      for (int t = 0; t < 100; ++t) {
        const GridFunction f = random_grid(rng, dim, depth);
        const DyadicCube q0 = f.root_cube();
        const MaximalField m = dyadic_maximal(f, q0);
        const auto brute = oracle::brute_maximal(f, q0);
        if (m.values != brute.values || m.provenance != brute.provenance) {
          o.fail("mismatch at n=" + std::to_string(dim) + " depth=" + std::to_string(depth) + " trial " + std::to_string(t));
          break;
        }
        ++compared;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.pass && secs >= 10.0) o.fail("took " + num(secs) + " s");
  if (o.pass) o.detail = std::to_string(compared) + " functions exact, " + num(std::round(secs * 100) / 100) + " s";
  return o;
}

// ---- 2 ----
Outcome cz_dyadic_suite() {
  Outcome o;
  Rng rng(202);
  std::size_t cubes = 0;
  std::size_t rejected = 0;
  for (int t = 0; t < 500 && o.pass; ++t) {
    const int dim = static_cast<int>(rng.integer(1, 2));
    const int depth = static_cast<int>(rng.integer(2, dim == 1 ? 8 : 5));
    const GridFunction f = random_grid(rng, dim, depth);
    const DyadicCube q0 = f.root_cube();
    const double avg = oracle::cube_average(f, q0, true);
    if (avg == 0.0) continue;
    const double lambda = t % 10 == 0 ? avg : avg * (1.0 + 3.0 * rng.uniform());
    const std::string tag = "trial " + std::to_string(t) + ": ";
    // precondition enforced just below the root average
    try {
      (void)cz_decompose_dyadic(f, q0, avg * 0.5);
      o.fail(tag + "precondition not enforced");
    } catch (const CzPreconditionError&) {
      ++rejected;
    }
    const CzCover cover = cz_decompose_dyadic(f, q0, lambda);
    const auto brute = oracle::brute_maximal(f, q0);
    const auto vals = oracle::restrict_values(f, q0);
    const std::size_t cells = vals.size();
    const double cell = q0.measure() / static_cast<double>(cells);
    const std::int64_t side = std::int64_t{1} << depth;
    std::vector<int> hits(cells, 0);
    for (std::size_t i = 0; i < cover.cubes.size(); ++i) {
      const DyadicCube& q = cover.cubes[i];
      const double a = oracle::cube_average(f, q, true);
      if (!(a > lambda - kVerifySlack) || !leq_with_slack(a, std::ldexp(lambda, dim))) {
        o.fail(tag + "average " + num(a) + " outside (lambda, 2^n lambda] on " + q.describe());
      }
      const int shift = depth - q.depth();
      for (std::size_t c = 0; c < cells; ++c) {
        const auto xy = oracle::coords_of(c, dim, side);
        bool inside = true;
        for (int d = 0; d < dim; ++d) inside = inside && (xy[d] >> shift) == q.index()[d];
        if (inside) ++hits[c];
      }
      ++cubes;
    }
    double e_measure = 0.0;
    double e_integral = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      const bool in_e = brute.values[c] > lambda;
      if (hits[c] > 1) o.fail(tag + "cubes overlap");
      if ((hits[c] == 1) != in_e) o.fail(tag + "union differs from the level set at cell " + std::to_string(c));
      if (hits[c] == 0 && !leq_with_slack(std::abs(vals[c]), lambda)) o.fail(tag + "|f| > lambda off the cubes");
      if (in_e) {
        e_measure += cell;
        e_integral += cell * std::abs(vals[c]);
      }
    }
    if (!leq_with_slack(e_measure, e_integral / lambda)) o.fail(tag + "weak-type estimate fails");
  }
  if (o.pass) o.detail = "500 pairs, " + std::to_string(cubes) + " cubes checked, " + std::to_string(rejected) + " bad levels rejected";
  return o;
}

// ---- 3 ----
Outcome jnp_oracle() {
  Outcome o;
  const GridFunction hand(RootGeometry::unit(1), 2, {0.0, 1.0, 1.0, 1.0});
  const auto dp = jnp_dyadic(hand, hand.root_cube(), 2.0);
  const auto bf = jnp_bruteforce(hand, hand.root_cube(), 2.0, 2);
  if (dp.value != 9.0 / 64.0 || bf.value != 9.0 / 64.0 || bf.partitions_enumerated != 5) {
    o.fail("hand value: dp " + num(dp.value) + ", brute " + num(bf.value));
  }
  Rng rng(303);
  for (int t = 0; t < 200 && o.pass; ++t) {
    const int dim = static_cast<int>(rng.integer(1, 2));
    const int depth = static_cast<int>(rng.integer(1, 3));
    const double p = t % 2 == 0 ? 2.0 : 3.0;
    const GridFunction f = random_grid(rng, dim, depth);
    const auto a = jnp_dyadic(f, f.root_cube(), p, depth);
    const auto b = jnp_bruteforce(f, f.root_cube(), p, depth);
    if (a.value != b.value) o.fail("trial " + std::to_string(t) + ": dp " + num(a.value) + " vs brute " + num(b.value));
  }
  if (o.pass) o.detail = "200 instances exact; f=(0,1,1,1) gives 9/64 over 5 partitions";
  return o;
}

// ---- 4 ----
Outcome good_lambda() {
  Outcome o;
  Rng rng(404);
  std::size_t levels_checked = 0;
  const double ps[] = {1.5, 2.0, 3.0};
  for (int t = 0; t < 100 && o.pass; ++t) {
    const int dim = static_cast<int>(rng.integer(1, 2));
    const int depth = static_cast<int>(rng.integer(1, 3));
    const double p = ps[t % 3];
    const double q = conjugate_exponent(p);
    const GridFunction f = random_grid(rng, dim, depth);
    const DyadicCube q0 = f.root_cube();
    const double b = std::exp2(-(dim + 1));
    const double a = 1.0 / (1.0 - std::ldexp(b, dim));
    const double K = jnp_bruteforce(f, q0, p, depth).norm;
    auto levels = good_lambda_critical_levels(f, q0, b);
    const double thr = good_lambda_threshold(f, q0, b);
    for (int extra = 0; extra < 5; ++extra) levels.push_back(thr * (1.0 + 4.0 * rng.uniform()));
    const auto reports = check_good_lambda_dyadic(f, q0, p, b, levels, K);
    const GridFunction g = f.shifted(-oracle::cube_average(f, q0, false));
    const auto mg = oracle::brute_maximal(g, q0);
    const double cell = q0.measure() / static_cast<double>(mg.values.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const double lam = levels[i];
      const double lhs = oracle::measure_above(mg.values, lam, cell);
      const double rhs = a * K / lam * std::pow(oracle::measure_above(mg.values, b * lam, cell), 1.0 / q);
      const std::string tag = "trial " + std::to_string(t) + " lambda " + num(lam) + ": ";
      if (!reports[i].pass) o.fail(tag + "report fails, margin " + num(reports[i].margin));
      if (!near(reports[i].lhs, lhs) || !near(reports[i].rhs, rhs, 1e-9)) o.fail(tag + "report disagrees with oracle");
      if (!leq_with_slack(lhs, rhs)) o.fail(tag + "oracle sides violate the inequality");
      ++levels_checked;
    }
  }
  if (o.pass) o.detail = "100 instances, " + std::to_string(levels_checked) + " levels, sides match oracle";
  return o;
}

// ---- 5 ----
Outcome jn_dyadic_bound() {
  Outcome o;
  std::vector<std::pair<std::string, GridFunction>> inputs;
  inputs.emplace_back("step", generate_function("step", FunctionParams{2.0, 6, 1, 0}));
  inputs.emplace_back("log-singularity n=1", generate_function("log-singularity", FunctionParams{2.0, 12, 1, 0}));
  inputs.emplace_back("log-singularity n=2", generate_function("log-singularity", FunctionParams{2.0, 6, 2, 0}));
  Rng rng(505);
  for (int t = 0; t < 50; ++t) {
    const int dim = static_cast<int>(rng.integer(1, 2));
    const int depth = static_cast<int>(rng.integer(3, dim == 1 ? 10 : 6));
    inputs.emplace_back("random " + std::to_string(t), random_grid(rng, dim, depth));
  }
  std::size_t count = 0;
  bool small = false;
  bool large = false;
  for (const auto& [name, f] : inputs) {
    for (double p : {1.5, 2.0, 3.0}) {
      const DyadicCube q0 = f.root_cube();
      const auto reports = verify_jn_dyadic(f, q0, p);
      if (reports.size() != static_cast<std::size_t>(kSweepPoints)) o.fail(name + ": sweep has " + std::to_string(reports.size()) + " points");
      for (const auto& r : reports) {
        if (!r.pass) o.fail(name + " p=" + num(p) + " lambda " + num(r.lambda) + ": margin " + num(r.margin));
        if (r.lhs != oracle::brute_distribution(f, q0, r.lambda)) o.fail(name + ": distribution differs from oracle");
        const std::string branch = r.witness.value("branch", "");
        small = small || branch == "small";
        large = large || branch == "large";
        ++count;
      }
    }
  }
  if (o.pass && !(small && large)) o.fail("a branch was never exercised");
  if (o.pass) o.detail = std::to_string(inputs.size()) + " functions x 3 exponents, " + std::to_string(count) + " sweep points";
  return o;
}

// ---- 6 ----
Outcome notlp() {
  Outcome o;
  const auto terms = notlp_terms(2.0, 8, 14);
  double worst = 0.0;
  for (int j = 0; j <= 6; ++j) worst = std::max(worst, std::abs(terms[j] - terms[0]) / terms[0]);
  if (worst > 0.15) o.fail("terms spread " + num(worst) + " of term 0");
  const auto long_terms = notlp_terms(2.0, 16, 18);
  double s8 = 0.0;
  double s16 = 0.0;
  for (int j = 0; j < 16; ++j) (j < 8 ? s8 : s16) += long_terms[j];
  s16 += s8;
  const double ratio = s16 / s8;
  if (ratio < 1.8) o.fail("S16/S8 = " + num(ratio));
  std::vector<double> w;
  for (int d : {10, 12, 14}) {
    const GridFunction f = power_singularity(2.0, d, 1);
    w.push_back(weak_lp(f, f.root_cube(), 2.0));
  }
  const double lo = *std::min_element(w.begin(), w.end());
  const double hi = *std::max_element(w.begin(), w.end());
  if ((hi - lo) / lo > 0.10) o.fail("weak-L^p values spread " + num((hi - lo) / lo));
  if (o.pass) {
    o.detail = "max term spread " + num(std::round(worst * 1e4) / 1e4) + ", S16/S8 " + num(std::round(ratio * 1e4) / 1e4) +
               ", weak-L^p spread " + num(std::round((hi - lo) / lo * 1e4) / 1e4);
  }
  return o;
}

// ---- shared metric trials ----
struct Trial {
  std::string name;
  MetricMeasureSpace space;
  std::vector<double> f;
  Ball b0;
  double p;
};

std::vector<Trial> metric_trials() {
  std::vector<Trial> out;
  Rng rng(707);
  const auto kinds = space_kinds();
  const double scales[] = {0.15, 0.3, 0.6, 1.1};
  const double ps[] = {1.5, 2.0, 3.0};
  for (int t = 0; t < 50; ++t) {
    const std::string kind = kinds[t % kinds.size()];
    const auto m = static_cast<std::size_t>(rng.integer(8, 60));
    auto space = generate_space(kind, m, 1000 + t);
    const auto fname = t % 2 == 0 ? "random-uniform" : "log-distance";
    auto f = generate_point_function(fname, space, 2000 + t);
    const auto center = static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(m) - 1));
    const Ball b0{center, scales[(t / 4) % 4] * space.diameter() + 1e-9};
    out.push_back(Trial{kind + " m=" + std::to_string(m) + " " + fname, std::move(space), std::move(f), b0, ps[t % 3]});
  }
  return out;
}

std::vector<double> centered_abs(const Trial& t) {
  const double mean = oracle::ball_average(t.space, t.f, t.b0);
  std::vector<double> g(t.f.size());
  for (std::size_t y = 0; y < g.size(); ++y) g[y] = std::abs(t.f[y] - mean);
  return g;
}

double threshold(const MetricMeasureSpace& s, std::span<const double> g, const Ball& b0) {
  double integral = 0.0;
  for (auto y : oracle::members(s, b0.center, 11.0 * b0.radius)) integral += s.weights()[y] * g[y];
  return integral / oracle::ball_measure(s, b0);
}

std::string cover_violation(const MetricMeasureSpace& s, std::span<const double> g, const Ball& b0,
                            const CzBallCover& cover) {
  const double c3 = std::pow(s.doubling_constant(), 3);
  const double lam = cover.level;
  const auto inner = oracle::members(s, b0.center, b0.radius);
  const auto big = oracle::members(s, b0.center, 11.0 * b0.radius);
  std::vector<char> covered(s.size(), 0);
  for (std::size_t i = 0; i < cover.balls.size(); ++i) {
    const Ball& b = cover.balls[i];
    if (!std::binary_search(inner.begin(), inner.end(), b.center)) return "center outside B0";
    for (std::size_t j = 0; j < i; ++j) {
      if (!oracle::disjoint(oracle::members(s, b.center, b.radius),
                            oracle::members(s, cover.balls[j].center, cover.balls[j].radius))) {
        return "balls meet";
      }
    }
    const auto five = oracle::members(s, b.center, 5.0 * b.radius);
    if (!oracle::subset(five, big)) return "5B leaves 11B0";
    for (auto y : five) covered[y] = 1;
    const double a = oracle::ball_average(s, g, b);
    const double d = oracle::ball_average(s, g, b.dilate(5.0));
    if (!(a > lam - kVerifySlack * std::max(1.0, lam)) || !leq_with_slack(a, c3 * lam)) return "(ii) fails: " + num(a);
    if (!(d > lam / c3 - kVerifySlack * std::max(1.0, lam / c3)) || !leq_with_slack(d, lam)) return "(iii) fails: " + num(d);
  }
  for (auto y : inner) {
    if (!covered[y] && !leq_with_slack(g[y], lam)) return "(i) fails at point " + std::to_string(y);
  }
  return {};
}

// ---- 7 ----
Outcome metric_cz_suite(const std::vector<Trial>& trials) {
  Outcome o;
  std::size_t nonempty = 0;
  std::size_t balls = 0;
  std::size_t links = 0;
  for (const auto& t : trials) {
    const auto g = centered_abs(t);
    if (std::abs(t.space.doubling_constant() - oracle::doubling(t.space)) > 1e-12) {
      o.fail(t.name + ": doubling constant differs from brute force");
    }
    const double lam = 1.2 * threshold(t.space, g, t.b0);
    const CzBallCover cover = cz_balls(t.space, g, t.b0, lam);
    const std::string bad = cover_violation(t.space, g, t.b0, cover);
    if (!bad.empty()) o.fail(t.name + ": " + bad);
    nonempty += cover.balls.empty() ? 0 : 1;
    balls += cover.balls.size();
    const double levels[3] = {lam, 2.0 * lam, 4.0 * lam};
    const NestedCovers nc = nested_cz(t.space, g, t.b0, levels);
    for (std::size_t n = 0; n < 3; ++n) {
      const std::string lvl_bad = cover_violation(t.space, g, t.b0, nc.covers[n]);
      if (!lvl_bad.empty()) o.fail(t.name + " level " + std::to_string(n) + ": " + lvl_bad);
    }
    for (std::size_t n = 0; n + 1 < 3; ++n) {
      const auto& hi = nc.covers[n + 1];
      const auto& lo = nc.covers[n];
      if (nc.containment[n].size() != hi.balls.size()) o.fail(t.name + ": containment map not total");
      for (std::size_t i = 0; i < hi.balls.size() && i < nc.containment[n].size(); ++i) {
        const Ball& outer = lo.balls.at(nc.containment[n][i]);
        if (!oracle::subset(oracle::members(t.space, hi.balls[i].center, hi.balls[i].radius),
                            oracle::members(t.space, outer.center, 5.0 * outer.radius))) {
          o.fail(t.name + ": containment map entry is wrong");
        }
        ++links;
      }
    }
  }
  if (o.pass && nonempty == 0) o.fail("every cover was empty; the suite exercised nothing");
  if (o.pass) {
    o.detail = std::to_string(trials.size()) + " spaces, " + std::to_string(nonempty) + " nonempty covers, " +
               std::to_string(balls) + " balls, " + std::to_string(links) + " containment links";
  }
  return o;
}

// ---- 8 ----
Outcome toiterate(const std::vector<Trial>& trials) {
  Outcome o;
  double worst = std::numeric_limits<double>::infinity();
  std::size_t active = 0;
  for (const auto& t : trials) {
    const auto g = centered_abs(t);
    const double lam = 1.2 * threshold(t.space, g, t.b0);
    const CheckReport r = check_toiterate(t.space, t.f, t.b0, lam, t.p);
    if (!r.pass) o.fail(t.name + ": margin " + num(r.margin));
    const CzBallCover cover = cz_balls(t.space, g, t.b0, lam);
    std::vector<Ball> fives;
    for (const auto& b : cover.balls) fives.push_back(b.dilate(5.0));
    if (!oracle::admissible(t.space, t.b0, fives)) o.fail(t.name + ": dilate family is not admissible");
    const double S = oracle::family_sum(t.space, t.f, fives, t.p);
    if (!near(r.witness.at("S").get<double>(), S, 1e-9)) o.fail(t.name + ": S differs from oracle");
    active += r.lhs > 0.0 ? 1 : 0;
    worst = std::min(worst, r.margin);
  }
  if (o.pass) o.detail = "50 trials, " + std::to_string(active) + " with a nonempty 2-lambda cover, min margin " + num(worst);
  return o;
}

// ---- 9 ----
Outcome mainresult(const std::vector<Trial>& trials) {
  Outcome o;
  std::size_t points = 0;
  for (const auto& t : trials) {
    const auto reports = verify_mainresult(t.space, t.f, t.b0, t.p);
    bool small = false;
    bool large = false;
    const double mu0 = oracle::ball_measure(t.space, t.b0);
    const double c = t.space.doubling_constant();
    for (const auto& r : reports) {
      if (!r.pass) o.fail(t.name + " " + r.claim + " lambda " + num(r.lambda) + ": margin " + num(r.margin));
      if (r.degenerate()) continue;
      const double l0 = r.witness.at("lambda0").get<double>();
      if (!near(l0, 3.0 * std::pow(c, 8) / std::pow(mu0, 1.0 / t.p))) o.fail(t.name + ": lambda0 is not C1/mu(B0)^{1/p}");
      if (r.claim != "mainresult") continue;
      const std::string branch = r.witness.at("branch").get<std::string>();
      small = small || branch == "small";
      large = large || branch == "large";
      ++points;
    }
    if (!(small && large) && !(reports.size() == 1 && reports[0].degenerate())) o.fail(t.name + ": a branch was not exercised");
  }
  if (o.pass) o.detail = "50 spaces, " + std::to_string(points) + " sweep points, both branches in every run";
  return o;
}

// ---- 10 ----
Outcome bmo_theorem() {
  Outcome o;
  std::size_t sweep = 0;
  std::size_t halving = 0;
  std::size_t runs = 0;
  const std::size_t sizes[] = {16, 25, 36, 49, 64};
  for (std::size_t m : sizes) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto space = generate_space("grid2d", m, seed);
      const auto f = generate_point_function("log-distance", space, seed * 31 + m);
      const double scale = 0.2 + 0.3 * static_cast<double>(seed - 1);
      const Ball b0{static_cast<std::size_t>((seed * 7) % m), scale * space.diameter() + 1e-9};
      const std::string tag = "grid m=" + std::to_string(m) + " seed " + std::to_string(seed) + ": ";
      if (!near(bmo_norm_metric(space, f), oracle::bmo(space, f))) o.fail(tag + "BMO norm differs from brute force");
      const auto reports = verify_bmo_jn(space, f, b0);
      std::size_t h = 0;
      for (const auto& r : reports) {
        if (!r.pass) o.fail(tag + r.claim + " lambda " + num(r.lambda) + ": margin " + num(r.margin));
        if (r.claim == "bmo") ++sweep;
        if (r.claim == "bmo.halving") ++h;
      }
      if (h != 4) o.fail(tag + "expected 4 halving reports, got " + std::to_string(h));
      halving += h;
      ++runs;
    }
  }
  if (o.pass) {
    o.detail = std::to_string(runs) + " runs, " + std::to_string(sweep) + " sweep points, " + std::to_string(halving) +
               " halving pairs";
  }
  return o;
}

// ---- 11 ----
Outcome subset_chain(const std::vector<Trial>& trials) {
  Outcome o;
  std::size_t families = 0;
  std::size_t balls = 0;
  for (const auto& t : trials) {
    const auto mf = global_maximal(t.space, t.f);
    const auto mf_brute = oracle::maximal(t.space, [&] {
      std::vector<double> a(t.f.size());
      for (std::size_t y = 0; y < a.size(); ++y) a[y] = std::abs(t.f[y]);
      return a;
    }(), std::nullopt);
    for (std::size_t y = 0; y < mf.size(); ++y) {
      if (!near(mf[y], mf_brute[y])) o.fail(t.name + ": maximal function differs from brute force");
    }
    std::vector<std::vector<Ball>> fams;
    fams.push_back({t.b0});
    fams.push_back(jnp_metric_lower(t.space, t.f, t.b0, t.p, 400, 7).family.balls);
    const auto g = centered_abs(t);
    for (double k : {1.2, 2.4}) {
      std::vector<Ball> fives;
      for (const auto& b : cz_balls(t.space, g, t.b0, k * threshold(t.space, g, t.b0)).balls) fives.push_back(b.dilate(5.0));
      fams.push_back(fives);
    }
    for (const auto& fam : fams) {
      if (!oracle::admissible(t.space, t.b0, fam)) {
        o.fail(t.name + ": generated family is not admissible");
        continue;
      }
      ++families;
      for (const Ball& b : fam) {
        const auto fifth = oracle::members(t.space, b.center, b.radius / 5.0);
        double inf = std::numeric_limits<double>::infinity();
        for (auto y : fifth) inf = std::min(inf, mf[y]);
        const double avg_mf = oracle::ball_average(t.space, mf, b.dilate(0.2));
        double abs_avg = 0.0;
        double mu = 0.0;
        for (auto y : oracle::members(t.space, b.center, b.radius)) {
          abs_avg += t.space.weights()[y] * std::abs(t.f[y]);
          mu += t.space.weights()[y];
        }
        abs_avg /= mu;
        if (!leq_with_slack(inf, avg_mf) || !leq_with_slack(abs_avg, inf)) o.fail(t.name + ": chain fails on a ball");
        ++balls;
      }
    }
  }
  if (o.pass) o.detail = std::to_string(families) + " admissible families, " + std::to_string(balls) + " balls";
  return o;
}

// ---- 12 ----
Outcome vitali_and_doubling(const std::vector<Trial>& trials) {
  Outcome o;
  const auto line = generate_space("line", 10, 0);
  if (line.doubling_constant() != 3.0 || oracle::doubling(line) != 3.0) {
    o.fail("doubling of {0..9} is " + num(line.doubling_constant()));
  }
  Rng rng(1212);
  std::size_t calls = 0;
  std::size_t ball_pairs = 0;
  for (const auto& t : trials) {
    const auto& s = t.space;
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<Ball> balls;
      for (int i = 0; i < 100; ++i) {
        balls.push_back(Ball{static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(s.size()) - 1)),
                             (0.01 + rng.uniform()) * s.diameter()});
      }
      const auto kept = vitali_subcover(s, balls);
      const std::string bad = oracle::vitali_violation(s, balls, kept);
      if (!bad.empty()) o.fail(t.name + ": Vitali " + bad);
      ++calls;
    }
    const double c = s.doubling_constant();
    for (const Ball& b : oracle::every_ball(s)) {
      if (!leq_with_slack(oracle::ball_measure(s, b.dilate(2.0)), c * oracle::ball_measure(s, b))) {
        o.fail(t.name + ": a ball doubles by more than c");
      }
      ++ball_pairs;
    }
  }
  if (o.pass) {
    o.detail = "c({0..9}) = 3, " + std::to_string(calls) + " Vitali runs, " + std::to_string(ball_pairs) +
               " balls within the doubling bound";
  }
  return o;
}

// ---- 13 ----
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Outcome determinism(const std::string& cli, const std::filesystem::path& dir) {
  Outcome o;
  if (cli.empty()) {
    o.fail("no CLI path given");
    return o;
  }
  std::filesystem::create_directories(dir);
  struct Run {
    std::string args;
    bool plot;
  };
  const std::vector<Run> runs = {
      {"gen random-uniform --depth 6 --seed 11", false},
      {"gen random-martingale --depth 5 --dim 2 --seed 12", false},
      {"gen random-cloud --m 40 --seed 5", false},
      {"gen tree-graph --m 30 --seed 6", false},
      {"analyze --gen random-martingale --depth 7 --dim 2 --seed 3", true},
      {"analyze metric --space-kind random-cloud --m 20 --gen random-uniform --seed 8", false},
      {"cz --gen random-uniform --depth 7 --seed 4", false},
      {"verify jn-dyadic --gen random-uniform --depth 6 --seed 9 --format csv", true},
      {"verify good-lambda --gen random-martingale --depth 3 --dim 2 --seed 10", false},
      {"verify mainresult --space-kind tree-graph --m 30 --gen random-uniform --seed 4", true},
      {"verify toiterate --space-kind line --m 32 --gen random-uniform --seed 13 --format csv", false},
      {"verify bmo --space-kind grid2d --m 36 --gen log-distance --seed 2", true},
  };
  std::size_t files = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "2"}) {
      const auto out = dir / ("run" + std::to_string(i) + "_" + std::to_string(outputs.size()) + ".out");
      const auto plot = dir / ("run" + std::to_string(i) + "_" + std::to_string(outputs.size()) + ".plot");
      std::string cmd = std::string("JNLAB_THREADS=") + threads + " \"" + cli + "\" " + runs[i].args + " --out \"" +
                        out.string() + "\"";
      if (runs[i].plot) cmd += " --plot \"" + plot.string() + "\"";
      const int status = std::system(cmd.c_str());
      if (status != 0) o.fail("`" + runs[i].args + "` exited with status " + std::to_string(status));
      outputs.push_back(slurp(out) + (runs[i].plot ? "\n--plot--\n" + slurp(plot) : ""));
    }
    if (outputs[0].empty()) o.fail("`" + runs[i].args + "` wrote nothing");
    if (outputs[0] != outputs[1]) o.fail("`" + runs[i].args + "` differs between identical runs");
    if (outputs[0] != outputs[2]) o.fail("`" + runs[i].args + "` differs between thread counts");
    files += runs[i].plot ? 2 : 1;
  }
  if (o.pass) o.detail = std::to_string(runs.size()) + " commands, " + std::to_string(files) + " outputs byte-identical across 3 runs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::filesystem::path scratch =
      argc > 2 ? std::filesystem::path(argv[2]) : std::filesystem::temp_directory_path() / "jnlab_acceptance";
  const auto trials = metric_trials();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"dyadic maximal function equals brute force", maximal_oracle},
      {"dyadic Calderon-Zygmund properties", cz_dyadic_suite},
      {"JN_p dynamic program equals exhaustive search", jnp_oracle},
      {"dyadic good-lambda inequality", good_lambda},
      {"dyadic John-Nirenberg weak-L^p bound", jn_dyadic_bound},
      {"x^{-1/p} has constant terms, linear partial sums, stable weak-L^p", notlp},
      {"metric Calderon-Zygmund balls and nesting", [&] { return metric_cz_suite(trials); }},
      {"metric good-lambda step", [&] { return toiterate(trials); }},
      {"metric John-Nirenberg bound chain", [&] { return mainresult(trials); }},
      {"BMO exponential bound and halving", bmo_theorem},
      {"maximal function dominates ball averages on admissible families", [&] { return subset_chain(trials); }},
      {"Vitali selection and doubling constant", [&] { return vitali_and_doubling(trials); }},
      {"seeded runs are byte-identical", [&] { return determinism(cli, scratch); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %2zu %s  %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
