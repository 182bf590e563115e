#include "jnlab/constants.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace jnlab {

double conjugate_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("exponent p must be a finite number > 1");
  return p / (p - 1.0);
}

Constants theorem_constants(double c_mu, double p, int n, const ConstantsAux& aux) {
  if (!(c_mu >= 1.0) || !std::isfinite(c_mu)) throw std::invalid_argument("doubling constant must be >= 1");
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  Constants k;
  k.c_mu = c_mu;
  k.p = p;
  k.q = conjugate_exponent(p);
  k.n = n;
  const double c8 = std::pow(c_mu, 8);
  k.C1 = 3.0 * c8;
  k.a = 2.0 * c8;
  k.c1 = 4.0 * std::pow(c_mu, 7);
  k.c2 = std::numbers::ln2 / k.a;
  const double pq = p / k.q;
  k.dyadic_constant = std::exp2(p + (n + 1) * (p * p + pq * pq * pq));
  k.small_lambda_constant = std::exp2((n + 1) * p);
  k.b = std::exp2(-(n + 1));
  if (aux.ball_measure) {
    if (!(*aux.ball_measure > 0.0)) throw std::invalid_argument("ball measure must be positive");
    k.lambda0 = k.C1 / std::pow(*aux.ball_measure, 1.0 / p);
  }
  if (aux.cube_measure && aux.K) {
    if (!(*aux.cube_measure > 0.0)) throw std::invalid_argument("cube measure must be positive");
    k.eta = *aux.K / (k.b * std::pow(*aux.cube_measure, 1.0 / p));
  }
  return k;
}

double inverse_g(int N, double p) {
  if (N < 0) throw std::invalid_argument("inverse_g: N must be >= 0");
  const double q = conjugate_exponent(p);
  if (N <= 1) return 1.0;
  double num = 0.0;
  for (int i = 1; i <= N - 1; ++i) num += i * std::pow(q, -i);
  const double den = (N - 1) * (p - p * std::pow(q, -N));
  return std::exp2(num - den);
}

}  // namespace jnlab
