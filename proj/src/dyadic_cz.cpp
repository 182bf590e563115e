#include "jnlab/dyadic_cz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jnlab/constants.hpp"
#include "jnlab/jn_functionals.hpp"
#include "jnlab/numeric.hpp"

namespace jnlab {

double MaximalField::max_value() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

MaximalField dyadic_maximal(const GridFunction& f, const DyadicCube& q0) { return dyadic_maximal(DyadicTree(f, q0)); }

MaximalField dyadic_maximal(const DyadicTree& tree) {
  const int n = tree.dimension();
  const int top = tree.top().depth();
  std::vector<double> run{tree.abs_average(0, 0)};
  std::vector<int> prov{top};
  for (int l = 1; l <= tree.levels(); ++l) {
    const std::size_t cubes = tree.cubes_at(l);
    std::vector<double> next(cubes);
    std::vector<int> next_prov(cubes);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(cubes); ++c) {
      const std::size_t parent = static_cast<std::size_t>(c) >> n;
      const double a = tree.abs_average(l, static_cast<std::size_t>(c));
      if (a > run[parent]) {
        next[c] = a;
        next_prov[c] = top + l;
      } else {
        next[c] = run[parent];
        next_prov[c] = prov[parent];
      }
    }
    run.swap(next);
    prov.swap(next_prov);
  }
  MaximalField m{tree.top(), tree.levels(), std::vector<double>(run.size()), std::vector<int>(run.size())};
  const auto to_lex = tree.morton_to_lex();
  for (std::size_t i = 0; i < run.size(); ++i) {
    m.values[to_lex[i]] = run[i];
    m.provenance[to_lex[i]] = prov[i];
  }
  return m;
}

namespace {

RootGeometry geometry_of(const DyadicCube& q) { return RootGeometry{q.lower_corner(), q.side()}; }

std::vector<bool> strict_above(std::span<const double> field, double lambda) {
  std::vector<bool> in(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) in[i] = field[i] > lambda;
  return in;
}

}  // namespace

CellSet level_set(const MaximalField& m, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("level_set: lambda must be >= 0");
  return CellSet::from_membership(geometry_of(m.q0), m.levels, strict_above(m.values, lambda));
}

CellSet level_set(const MaximalField& m, double lambda, const DyadicCube& q0) {
  if (!(q0 == m.q0)) throw std::invalid_argument("level_set: cube differs from the field's cube");
  return level_set(m, lambda);
}

CzPreconditionError::CzPreconditionError(double average, double lambda)
    : std::invalid_argument("average of |f| over Q0 is " + format_double(average) + ", above the level " +
                            format_double(lambda)),
      average_(average),
      lambda_(lambda) {}

CzCover cz_decompose_dyadic(const GridFunction& f, const DyadicCube& q0, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("cz_decompose_dyadic: lambda must be > 0");
  const DyadicTree tree(f, q0);
  const double top_avg = tree.abs_average(0, 0);
  if (!leq_with_slack(top_avg, lambda)) throw CzPreconditionError(top_avg, lambda);

  CzCover cover;
  cover.level = lambda;
  std::vector<bool> covered(tree.cells_in(0), false);
  const std::size_t fan = std::size_t{1} << tree.dimension();
  const auto to_lex = tree.morton_to_lex();

  // Coarsest-first: a cube is selected the first time its average exceeds lambda.
  struct Frame {
    int level;
    std::size_t code;
  };
  std::vector<Frame> stack;
  if (tree.levels() > 0) {
    for (std::size_t j = fan; j-- > 0;) stack.push_back({1, j});
  }
  while (!stack.empty()) {
    const Frame fr = stack.back();
    stack.pop_back();
    const double avg = tree.abs_average(fr.level, fr.code);
    if (avg > lambda) {
      cover.cubes.push_back(tree.cube(fr.level, fr.code));
      cover.averages.push_back(avg);
      const auto [lo, hi] = tree.cell_range(fr.level, fr.code);
      for (std::size_t i = lo; i < hi; ++i) covered[to_lex[i]] = true;
    } else if (fr.level < tree.levels()) {
      for (std::size_t j = fan; j-- > 0;) stack.push_back({fr.level + 1, fr.code * fan + j});
    }
  }
  std::vector<bool> residual(covered.size());
  for (std::size_t i = 0; i < covered.size(); ++i) residual[i] = !covered[i];
  cover.residual = CellSet::from_membership(geometry_of(q0), tree.levels(), std::move(residual));
  return cover;
}

CzPropertyCheck check_cz_properties(const GridFunction& f, const DyadicCube& q0, const CzCover& cover) {
  CzPropertyCheck chk;
  const double lambda = cover.level;
  const GridFunction sub = f.restricted_to(q0);
  const auto vals = sub.values();
  const int n = f.dimension();
  const int levels = sub.max_depth();
  auto note = [&](bool& flag, const std::string& what) {
    if (flag && chk.first_violation.empty()) chk.first_violation = what;
    flag = false;
  };

  // Cubes re-expressed on Q0's own grid so cell membership is a coordinate test.
  std::vector<bool> in_union(vals.size(), false);
  for (std::size_t k = 0; k < cover.cubes.size(); ++k) {
    const DyadicCube& q = cover.cubes[k];
    if (!q0.contains(q) || q == q0) {
      note(chk.disjoint, "cube " + q.describe() + " is not a proper subcube of Q0");
      continue;
    }
    const int rel_depth = q.depth() - q0.depth();
    const int shift = levels - rel_depth;
    NeumaierSum s;
    std::size_t cnt = 0;
    for (std::size_t lex = 0; lex < vals.size(); ++lex) {
      const auto c = sub.cell_coords(lex);
      bool inside = true;
      for (int d = 0; d < n && inside; ++d) {
        inside = (c[d] >> shift) == q.index()[d] - (q0.index()[d] << rel_depth);
      }
      if (!inside) continue;
      if (in_union[lex]) note(chk.disjoint, "cube " + q.describe() + " overlaps an earlier cube");
      in_union[lex] = true;
      s.add(std::abs(vals[lex]));
      ++cnt;
    }
    const double avg = s.value() / static_cast<double>(cnt);
    if (!(avg > lambda) || !leq_with_slack(avg, std::exp2(n) * lambda)) {
      note(chk.averages_bracketed, "cube " + q.describe() + " has average " + format_double(avg));
    }
  }

  const MaximalField m = dyadic_maximal(f, q0);
  const CellSet e = level_set(m, lambda);
  NeumaierSum integral;
  for (std::size_t lex = 0; lex < vals.size(); ++lex) {
    if (e.membership[lex] != in_union[lex]) note(chk.union_is_level_set, "cell " + std::to_string(lex) + " differs");
    if (!in_union[lex] && !leq_with_slack(std::abs(vals[lex]), lambda)) {
      note(chk.residual_bounded, "residual cell " + std::to_string(lex) + " has |f| = " + format_double(vals[lex]));
    }
    if (e.membership[lex]) integral.add(std::abs(vals[lex]));
  }
  chk.level_set_measure = e.measure;
  chk.weak_type_bound = integral.value() * sub.cell_measure() / lambda;
  if (!leq_with_slack(chk.level_set_measure, chk.weak_type_bound)) {
    note(chk.weak_type, "weak-type estimate fails: " + format_double(chk.level_set_measure) + " > " +
                            format_double(chk.weak_type_bound));
  }
  return chk;
}

namespace {

struct GoodLambdaSetup {
  MaximalField field;
  double threshold;
  double a;
  double q;
};

GoodLambdaSetup good_lambda_setup(const GridFunction& f, const DyadicCube& q0, double p, double b) {
  const double q = conjugate_exponent(p);
  const double cap = std::exp2(-f.dimension());
  if (!(b > 0.0 && b < cap)) {
    throw std::invalid_argument("good-lambda: b must lie in (0, 2^-n), got " + format_double(b));
  }
  const GridFunction g = f.shifted(-average(f, q0));
  const DyadicTree tree(g, q0);
  return GoodLambdaSetup{dyadic_maximal(tree), mean_oscillation(f, q0) / b, 1.0 / (1.0 - std::exp2(f.dimension()) * b), q};
}

double strict_measure(const MaximalField& m, double cell, double level) {
  std::size_t c = 0;
  for (double v : m.values) c += v > level ? 1 : 0;
  return cell * static_cast<double>(c);
}

CheckReport good_lambda_report(const GoodLambdaSetup& s, const DyadicCube& q0, double p, double b, double lambda,
                               double K) {
  if (!(lambda > 0.0) || !leq_with_slack(s.threshold, lambda)) {
    throw std::invalid_argument("good-lambda: lambda " + format_double(lambda) + " is below the threshold " +
                                format_double(s.threshold));
  }
  if (!(K >= 0.0)) throw std::invalid_argument("good-lambda: K must be >= 0");
  const double cell = q0.measure() / static_cast<double>(s.field.values.size());
  const double lhs = strict_measure(s.field, cell, lambda);
  const double lower = strict_measure(s.field, cell, b * lambda);
  const double rhs = s.a * K / lambda * std::pow(lower, 1.0 / s.q);
  nlohmann::json w = {{"b", b}, {"a", s.a}, {"K", K}, {"p", p}, {"q", s.q}, {"lower_level_measure", lower},
                      {"threshold", s.threshold}};
  return make_report("good_lambda_dyadic", lambda, lhs, rhs, s.a, std::move(w));
}

}  // namespace

double good_lambda_threshold(const GridFunction& f, const DyadicCube& q0, double b) {
  if (!(b > 0.0)) throw std::invalid_argument("good-lambda: b must be > 0");
  return mean_oscillation(f, q0) / b;
}

CheckReport check_good_lambda_dyadic(const GridFunction& f, const DyadicCube& q0, double p, double b, double lambda,
                                     double K) {
  const auto s = good_lambda_setup(f, q0, p, b);
  return good_lambda_report(s, q0, p, b, lambda, K);
}

std::vector<CheckReport> check_good_lambda_dyadic(const GridFunction& f, const DyadicCube& q0, double p, double b,
                                                  std::span<const double> lambdas, double K) {
  const auto s = good_lambda_setup(f, q0, p, b);
  std::vector<CheckReport> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(good_lambda_report(s, q0, p, b, l, K));
  return out;
}

std::vector<double> good_lambda_critical_levels(const GridFunction& f, const DyadicCube& q0, double b) {
  const double thr = good_lambda_threshold(f, q0, b);
  const GridFunction g = f.shifted(-average(f, q0));
  const MaximalField m = dyadic_maximal(g, q0);
  std::vector<double> vals(m.values);
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::vector<double> out;
  auto add = [&](double x) {
    if (x > 0.0 && std::isfinite(x) && x >= thr) out.push_back(x);
  };
  add(thr > 0.0 ? thr : std::numeric_limits<double>::min());
  for (double v : vals) {
    for (double x : {v, v / b}) {
      add(x);
      add(std::nextafter(x, 0.0));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<CheckReport> verify_jn_dyadic(const GridFunction& f, const DyadicCube& q0, double p) {
  const PartitionValue jn = jnp_dyadic(f, q0, p);
  return verify_jn_dyadic(f, q0, p, jn.norm, "jnp_dyadic");
}

std::vector<CheckReport> verify_jn_dyadic(const GridFunction& f, const DyadicCube& q0, double p, double K,
                                          const std::string& k_source) {
  const Constants k = theorem_constants(1.0, p, f.dimension(), ConstantsAux{std::nullopt, q0.measure(), K});
  const double cmax = std::max(k.dyadic_constant, k.small_lambda_constant);
  if (!(K >= 0.0) || !std::isfinite(K)) throw std::invalid_argument("verify_jn_dyadic: K must be finite and >= 0");
  if (K == 0.0) {
    auto r = degenerate_report("jn_dyadic_weak_lp", 0.0, cmax, "K = 0: f is constant on Q0");
    r.witness["K"] = 0.0;
    r.witness["K_source"] = k_source;
    r.lhs = distribution(f, q0, 0.0);
    r.margin = r.rhs - r.lhs;
    r.pass = leq_with_slack(r.lhs, r.rhs);
    return {r};
  }
  const double scale = K / std::pow(q0.measure(), 1.0 / p);
  const double eta = *k.eta;
  std::vector<CheckReport> out(kSweepPoints);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < kSweepPoints; ++i) {
    const double lambda = scale * std::pow(10.0, -3.0 + 6.0 * i / (kSweepPoints - 1));
    const bool small = lambda <= eta;
    const double c = small ? k.small_lambda_constant : k.dyadic_constant;
    const double lhs = distribution(f, q0, lambda);
    const double rhs = c * std::pow(K / lambda, p);
    nlohmann::json w = {{"branch", small ? "small" : "large"}, {"eta", eta}, {"K", K}, {"K_source", k_source},
                        {"max_constant", cmax}, {"p", p}, {"n", f.dimension()}};
    out[i] = make_report("jn_dyadic_weak_lp", lambda, lhs, rhs, c, std::move(w));
  }
  return out;
}

}  // namespace jnlab
