#include "jnlab/check_report.hpp"

#include <cmath>
#include <ostream>

#include "jnlab/numeric.hpp"

namespace jnlab {

CheckReport make_report(std::string claim, double lambda, double lhs, double rhs, double constant,
                        nlohmann::json witness) {
  CheckReport r;
  r.claim = std::move(claim);
  r.lambda = lambda;
  r.lhs = lhs;
  r.rhs = rhs;
  r.constant = constant;
  r.margin = rhs - lhs;
  r.pass = leq_with_slack(lhs, rhs);
  r.witness = witness.is_object() ? std::move(witness) : nlohmann::json::object();
  return r;
}

CheckReport degenerate_report(std::string claim, double lambda, double constant, std::string why) {
  nlohmann::json w = nlohmann::json::object();
  w["degenerate"] = true;
  w["reason"] = std::move(why);
  return make_report(std::move(claim), lambda, 0.0, 0.0, constant, std::move(w));
}

bool all_pass(std::span<const CheckReport> reports) { return failure_count(reports) == 0; }

std::size_t failure_count(std::span<const CheckReport> reports) {
  std::size_t bad = 0;
  for (const auto& r : reports) bad += r.pass ? 0 : 1;
  return bad;
}

namespace {
nlohmann::json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}
}  // namespace

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j = nlohmann::json::object();
  j["claim"] = r.claim;
  j["lambda"] = number_or_string(r.lambda);
  j["lhs"] = number_or_string(r.lhs);
  j["rhs"] = number_or_string(r.rhs);
  j["constant"] = number_or_string(r.constant);
  j["margin"] = number_or_string(r.margin);
  j["pass"] = r.pass;
  j["witness"] = r.witness;
  return j;
}

nlohmann::json to_json(std::span<const CheckReport> reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

void write_reports_json(std::ostream& out, std::span<const CheckReport> reports) {
  out << to_json(reports).dump(2) << '\n';
}

void write_reports_csv(std::ostream& out, std::span<const CheckReport> reports) {
  out << "claim,lambda,lhs,rhs,constant,margin,pass\n";
  for (const auto& r : reports) {
    out << r.claim << ',' << format_double(r.lambda) << ',' << format_double(r.lhs) << ','
        << format_double(r.rhs) << ',' << format_double(r.constant) << ',' << format_double(r.margin) << ','
        << (r.pass ? "true" : "false") << '\n';
  }
}

void write_plot_csv(std::ostream& out, std::span<const CheckReport> reports) {
  out << "lambda,lhs,rhs\n";
  for (const auto& r : reports) {
    out << format_double(r.lambda) << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << '\n';
  }
}

}  // namespace jnlab
