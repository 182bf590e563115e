#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace jnlab {

/// One verified inequality lhs <= rhs.
struct CheckReport {
  std::string claim;
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  double margin = 0.0;
  bool pass = true;
  nlohmann::json witness = nlohmann::json::object();

  [[nodiscard]] bool degenerate() const { return witness.value("degenerate", false); }
};

/// Fills margin and pass from lhs and rhs.
CheckReport make_report(std::string claim, double lambda, double lhs, double rhs, double constant,
                        nlohmann::json witness = nlohmann::json::object());

/// Degenerate (0 <= 0) report, flagged in its witness.
CheckReport degenerate_report(std::string claim, double lambda, double constant, std::string why);

[[nodiscard]] bool all_pass(std::span<const CheckReport> reports);
[[nodiscard]] std::size_t failure_count(std::span<const CheckReport> reports);

nlohmann::json to_json(const CheckReport& r);
nlohmann::json to_json(std::span<const CheckReport> reports);

void write_reports_json(std::ostream& out, std::span<const CheckReport> reports);
/// claim,lambda,lhs,rhs,constant,margin,pass
void write_reports_csv(std::ostream& out, std::span<const CheckReport> reports);
/// lambda,lhs,rhs
void write_plot_csv(std::ostream& out, std::span<const CheckReport> reports);

}  // namespace jnlab
