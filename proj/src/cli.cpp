#include "jnlab/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jnlab/check_report.hpp"
#include "jnlab/constants.hpp"
#include "jnlab/dyadic_cz.hpp"
#include "jnlab/generators.hpp"
#include "jnlab/jn_functionals.hpp"
#include "jnlab/metric_cz.hpp"
#include "jnlab/metric_space.hpp"
#include "jnlab/numeric.hpp"
#include "jnlab/parallel.hpp"

namespace jnlab {

namespace {

using nlohmann::json;

struct Config {
  std::string command;
  std::string target;
  std::string input;
  std::string space_file;
  std::string function_file;
  std::string gen;
  std::string space_kind;
  std::string out;
  std::string plot;
  std::string format = "json";
  double p = 2.0;
  int depth = 8;
  int dim = 1;
  std::size_t m = 32;
  std::uint64_t seed = 0;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::size_t> center;
  std::optional<double> radius;
  int terms = 8;
  std::size_t budget = 2000;
  double c_mu = 1.0;
  std::optional<double> ball_measure;
};

// Input errors that should map to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary);
    if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

FunctionParams function_params(const Config& c) { return FunctionParams{c.p, c.depth, c.dim, c.seed}; }

bool has_space(const Config& c) { return !c.space_file.empty() || !c.space_kind.empty(); }

GridFunction load_grid(const Config& c) {
  if (!c.input.empty()) {
    auto in = open_input(c.input);
    try {
      return read_grid_function_csv(in);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(c.input + ": " + e.what());
    }
  }
  if (c.gen.empty()) throw UsageError("a grid function needs --input FILE or --gen NAME");
  return generate_function(c.gen, function_params(c));
}

MetricMeasureSpace load_space(const Config& c) {
  if (!c.space_file.empty()) {
    auto in = open_input(c.space_file);
    try {
      return read_space_csv(in);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(c.space_file + ": " + e.what());
    }
  }
  if (c.space_kind.empty()) throw UsageError("a space needs --space FILE or --space-kind KIND");
  return generate_space(c.space_kind, c.m, c.seed);
}

std::vector<double> load_point_function(const Config& c, const MetricMeasureSpace& space) {
  if (!c.function_file.empty()) {
    auto in = open_input(c.function_file);
    try {
      return read_point_function_csv(in, space.size());
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(c.function_file + ": " + e.what());
    }
  }
  if (c.gen.empty()) throw UsageError("a point function needs --function FILE or --gen NAME");
  return generate_point_function(c.gen, space, c.seed);
}

// Default B0: the middle point index with a quarter of the diameter as radius.
Ball base_ball(const Config& c, const MetricMeasureSpace& space) {
  const std::size_t center = c.center.value_or(space.size() / 2);
  if (center >= space.size()) throw UsageError("--center is not a point of the space");
  double r = c.radius.value_or(space.diameter() / 4.0);
  if (!(r > 0.0)) r = 1.0;
  return Ball{center, r};
}

json ball_json(const MetricMeasureSpace& space, const Ball& b) {
  return {{"center", b.center}, {"radius", b.radius}, {"measure", space.measure(b)}, {"members", space.members(b)}};
}

void write_json(Sink& sink, const json& j) { *sink << j.dump(2) << '\n'; }

void write_key_values(Sink& sink, const json& j) {
  *sink << "key,value\n";
  for (const auto& [k, v] : j.items()) {
    if (v.is_structured()) continue;
    *sink << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
}

void emit(const Config& c, std::ostream& out, const json& j) {
  Sink sink(c.out, out);
  if (c.format == "csv") {
    write_key_values(sink, j);
  } else {
    write_json(sink, j);
  }
}

int emit_reports(const Config& c, std::ostream& out, const std::vector<CheckReport>& reports) {
  {
    Sink sink(c.out, out);
    if (c.format == "csv") {
      write_reports_csv(*sink, reports);
    } else {
      write_reports_json(*sink, reports);
    }
  }
  if (!c.plot.empty()) {
    Sink plot(c.plot, out);
    write_plot_csv(*plot, reports);
  }
  return failure_count(reports) == 0 ? 0 : 1;
}

int cmd_gen(const Config& c, std::ostream& out) {
  Sink sink(c.out, out);
  if (is_space_kind(c.target)) {
    write_space_csv(*sink, generate_space(c.target, c.m, c.seed));
    return 0;
  }
  if (has_space(c)) {
    const auto space = load_space(c);
    write_point_function_csv(*sink, generate_point_function(c.target, space, c.seed));
    return 0;
  }
  write_grid_function_csv(*sink, generate_function(c.target, function_params(c)));
  return 0;
}

void write_distribution_plot(const Config& c, std::ostream& out, const GridFunction& f) {
  const DyadicCube q0 = f.root_cube();
  const double mean = average(f, q0);
  double top = 0.0;
  for (double v : f.values()) top = std::max(top, std::abs(v - mean));
  Sink plot(c.plot, out);
  *plot << "lambda,measure\n";
  if (top == 0.0) return;
  for (int i = 0; i < kSweepPoints; ++i) {
    const double lam = top * std::pow(10.0, -3.0 + 3.0 * i / (kSweepPoints - 1));
    *plot << format_double(lam) << ',' << format_double(distribution(f, q0, lam)) << '\n';
  }
}

int cmd_analyze(const Config& c, std::ostream& out) {
  const std::string target = c.target.empty() ? (has_space(c) ? "metric" : "grid") : c.target;
  if (target == "notlp") {
    const auto terms = notlp_terms(c.p, c.terms, c.depth);
    if (c.format == "csv") {
      Sink sink(c.out, out);
      write_notlp_csv(*sink, terms);
    } else {
      json j = {{"p", c.p}, {"depth", c.depth}, {"terms", terms}};
      std::vector<double> partial;
      double s = 0.0;
      for (double t : terms) partial.push_back(s += t);
      j["partial_sums"] = partial;
      emit(c, out, j);
    }
    return 0;
  }
  if (target == "grid") {
    const GridFunction f = load_grid(c);
    const DyadicCube q0 = f.root_cube();
    const PartitionValue jn = jnp_dyadic(f, q0, c.p);
    json witness = json::array();
    for (const auto& q : jn.witness) witness.push_back(q.describe());
    json j = {{"p", c.p},
              {"dimension", f.dimension()},
              {"depth", f.max_depth()},
              {"jnp", jn.norm},
              {"jnp_sum", jn.value},
              {"bmo", bmo_dyadic(f, q0)},
              {"weak_lp", weak_lp(f, q0, c.p)},
              {"witness", witness}};
    emit(c, out, j);
    if (!c.plot.empty()) write_distribution_plot(c, out, f);
    return 0;
  }
  if (target == "metric") {
    const auto space = load_space(c);
    const auto f = load_point_function(c, space);
    const Ball b0 = base_ball(c, space);
    const MetricJnResult jn = jnp_metric_lower(space, f, b0, c.p, c.budget, c.seed);
    json family = json::array();
    for (const auto& b : jn.family.balls) family.push_back(ball_json(space, b));
    json j = {{"p", c.p},
              {"points", space.size()},
              {"doubling_constant", space.doubling_constant()},
              {"b0_center", b0.center},
              {"b0_radius", b0.radius},
              {"jnp_lower", jn.value},
              {"jnp_sum", jn.sum},
              {"exhaustive", jn.exhaustive},
              {"evaluations", jn.evaluations},
              {"ambient_truncated", jn.family.ambient_truncated},
              {"bmo", bmo_norm_metric(space, f)},
              {"family", family}};
    emit(c, out, j);
    return 0;
  }
  throw UsageError("analyze target must be grid, metric or notlp, not '" + target + "'");
}

int cmd_cz(const Config& c, std::ostream& out) {
  if (has_space(c)) {
    const auto space = load_space(c);
    const auto f = load_point_function(c, space);
    const Ball b0 = base_ball(c, space);
    const double lambda = std::isnan(c.lambda) ? 1.2 * cz_threshold(space, f, b0) : c.lambda;
    const CzBallCover cover = cz_balls(space, f, b0, lambda);
    json balls = json::array();
    for (std::size_t i = 0; i < cover.balls.size(); ++i) {
      json b = ball_json(space, cover.balls[i]);
      b["average"] = cover.ball_averages[i];
      b["dilate_average"] = cover.dilate_averages[i];
      b["seed"] = cover.seeds[i];
      b["exponent"] = cover.exponents[i];
      balls.push_back(b);
    }
    json j = {{"lambda", lambda},
              {"threshold", cz_threshold(space, f, b0)},
              {"doubling_constant", space.doubling_constant()},
              {"balls", balls},
              {"residual_measure", space.measure(cover.residual)},
              {"degenerate_dilates", cover.degenerate_dilates}};
    emit(c, out, j);
    return 0;
  }
  const GridFunction f = load_grid(c);
  const DyadicCube q0 = f.root_cube();
  const double lambda = std::isnan(c.lambda) ? 2.0 * abs_average(f, q0) : c.lambda;
  const CzCover cover = cz_decompose_dyadic(f, q0, lambda);
  const CzPropertyCheck check = check_cz_properties(f, q0, cover);
  json cubes = json::array();
  for (std::size_t i = 0; i < cover.cubes.size(); ++i) {
    cubes.push_back({{"cube", cover.cubes[i].describe()},
                     {"depth", cover.cubes[i].depth()},
                     {"index", cover.cubes[i].index()},
                     {"average", cover.averages[i]}});
  }
  json j = {{"lambda", lambda},
            {"cubes", cubes},
            {"level_set_measure", check.level_set_measure},
            {"weak_type_bound", check.weak_type_bound},
            {"properties_hold", check.ok()},
            {"first_violation", check.first_violation}};
  emit(c, out, j);
  return check.ok() ? 0 : 1;
}

int cmd_verify(const Config& c, std::ostream& out) {
  const std::string& t = c.target;
  if (t == "jn-dyadic" || t == "good-lambda") {
    const GridFunction f = load_grid(c);
    const DyadicCube q0 = f.root_cube();
    if (t == "jn-dyadic") return emit_reports(c, out, verify_jn_dyadic(f, q0, c.p));
    const double b = std::exp2(-(f.dimension() + 1));
    const double K = jnp_dyadic(f, q0, c.p).norm;
    const auto levels = good_lambda_critical_levels(f, q0, b);
    return emit_reports(c, out, check_good_lambda_dyadic(f, q0, c.p, b, levels, K));
  }
  if (t == "mainresult" || t == "bmo" || t == "toiterate") {
    const auto space = load_space(c);
    const auto f = load_point_function(c, space);
    const Ball b0 = base_ball(c, space);
    if (t == "mainresult") return emit_reports(c, out, verify_mainresult(space, f, b0, c.p));
    if (t == "bmo") return emit_reports(c, out, verify_bmo_jn(space, f, b0));
    std::vector<double> g(f.size());
    const double mean = space.average(f, b0);
    for (std::size_t y = 0; y < f.size(); ++y) g[y] = std::abs(f[y] - mean);
    double lambda = std::isnan(c.lambda) ? 1.2 * cz_threshold(space, g, b0) : c.lambda;
    if (lambda == 0.0) return emit_reports(c, out, {degenerate_report("toiterate", 0.0, 0.0, "f is constant on 11B0")});
    return emit_reports(c, out, {check_toiterate(space, f, b0, lambda, c.p)});
  }
  throw UsageError("verify target must be jn-dyadic, good-lambda, mainresult, bmo or toiterate, not '" + t + "'");
}

int cmd_show(const Config& c, std::ostream& out) {
  if (c.target != "constants") throw UsageError("show target must be constants");
  ConstantsAux aux;
  aux.ball_measure = c.ball_measure;
  const Constants k = theorem_constants(c.c_mu, c.p, c.dim, aux);
  json j = {{"c_mu", k.c_mu},
            {"p", k.p},
            {"q", k.q},
            {"n", k.n},
            {"C1", k.C1},
            {"a", k.a},
            {"c1", k.c1},
            {"c2", k.c2},
            {"dyadic_constant", k.dyadic_constant},
            {"small_lambda_constant", k.small_lambda_constant},
            {"b", k.b}};
  if (k.lambda0) j["lambda0"] = *k.lambda0;
  emit(c, out, j);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Numerical laboratory for John-Nirenberg type inequalities", "jnlab"};
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
  app.require_subcommand(1);
  app.add_option("--seed", c.seed, "random seed");
  app.add_option("--out", c.out, "output file (default stdout)");
  app.add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--plot", c.plot, "CSV of (lambda, lhs, rhs) or distribution points");
  app.add_option("--input", c.input, "grid function CSV");
  app.add_option("--space", c.space_file, "space CSV");
  app.add_option("--function", c.function_file, "point function CSV");
  app.add_option("--gen", c.gen, "generator for the input function");
  app.add_option("--space-kind", c.space_kind, "generator for the input space");
  app.add_option("--p", c.p, "exponent");
  app.add_option("--depth", c.depth, "grid depth D");
  app.add_option("--dim", c.dim, "dimension n");
  app.add_option("--m", c.m, "number of points");
  app.add_option("--lambda", c.lambda, "level");
  app.add_option("--center", c.center, "center index of B0");
  app.add_option("--radius", c.radius, "radius of B0");
  app.add_option("--terms", c.terms, "number of terms J");
  app.add_option("--budget", c.budget, "family evaluations for the metric search");
  app.add_option("--c-mu", c.c_mu, "doubling constant");
  app.add_option("--ball-measure", c.ball_measure, "measure of B0");

  struct Sub {
    const char* name;
    const char* help;
    bool target_required;
  };
  const Sub subs[] = {{"gen", "write a generated function or space", true},
                      {"analyze", "functionals of a function: grid, metric or notlp", false},
                      {"cz", "Calderon-Zygmund decomposition at a level", false},
                      {"verify", "run a verifier: jn-dyadic, good-lambda, mainresult, bmo, toiterate", true},
                      {"show", "print derived constants", true}};
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help)->fallthrough();
    auto* opt = sub->add_option("target", c.target, "what to act on");
    if (s.target_required) opt->required();
    sub->callback([&c, name = s.name] { c.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    configure_threads_from_env();
    if (c.command == "gen") return cmd_gen(c, out);
    if (c.command == "analyze") return cmd_analyze(c, out);
    if (c.command == "cz") return cmd_cz(c, out);
    if (c.command == "verify") return cmd_verify(c, out);
    return cmd_show(c, out);
  } catch (const std::logic_error& e) {
    // invalid_argument is a logic_error but means bad input.
    if (dynamic_cast<const std::invalid_argument*>(&e) == nullptr) {
      err << "jnlab: internal error: " << e.what() << '\n';
      return 1;
    }
    err << "jnlab: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "jnlab: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace jnlab
