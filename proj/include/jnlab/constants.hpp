#pragma once

#include <optional>

namespace jnlab {

/// Optional inputs for the data-dependent constants.
struct ConstantsAux {
  std::optional<double> ball_measure;  // mu(B0), enables lambda0
  std::optional<double> cube_measure;  // |Q0|, enables eta (with K)
  std::optional<double> K;             // JN_p norm, enables eta
};

struct Constants {
  double c_mu = 1.0;
  double p = 2.0;
  double q = 2.0;
  int n = 1;
  double C1 = 3.0;                  // 3 c^8
  std::optional<double> lambda0;    // C1 / mu(B0)^{1/p}
  double a = 2.0;                   // 2 c^8
  double c1 = 4.0;                  // 4 c^7
  double c2 = 0.0;                  // log 2 / a
  double dyadic_constant = 0.0;     // 2^{p + (n+1)(p^2 + (p/q)^3)}
  double small_lambda_constant = 0.0;  // 2^{(n+1) p}
  double b = 0.25;                  // 2^{-(n+1)}
  std::optional<double> eta;        // K / (b |Q0|^{1/p})
};

/// Throws std::invalid_argument unless c_mu >= 1, p > 1, n >= 1.
[[nodiscard]] Constants theorem_constants(double c_mu, double p, int n = 1, const ConstantsAux& aux = {});

[[nodiscard]] double conjugate_exponent(double p);

/// 1/g(N) = 2^{sum_{i=1}^{N-1} i q^{-i}} / 2^{(N-1)(p - p q^{-N})}; equals 1 for N = 0 and N = 1.
[[nodiscard]] double inverse_g(int N, double p);

}  // namespace jnlab
