#include "fracvolt/special.hpp"

#include <cmath>
#include <stdexcept>

#include "fracvolt/errors.hpp"
#include "fracvolt/numerics.hpp"

namespace fracvolt {
namespace {

double series(double a, double b, double c, double z, double tol, long max_terms = 100000) {
  double term = 1.0;
  double sum = 1.0;
  double comp = 0.0;
  for (long n = 0; n < max_terms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    const double t = sum + term;
    comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    if (term == 0.0 || std::abs(term) <= tol * std::abs(sum + comp)) return sum + comp;
  }
  throw NumericalError("2F1 series did not converge", sum + comp);
}

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-8; }

// Euler integral for 2F1(a,b;c;1-v), c > b > 0; refines towards both ends of (0,1).
double euler_integral(double a, double b, double c, double v, double tol) {
  // split at 1/2; the upper half runs in u = 1 - t so that u keeps full precision
  auto lower = [=](double t) {
    return std::pow(t, b - 1.0) * std::pow(1.0 - t, c - b - 1.0) * std::pow(v + (1.0 - v) * (1.0 - t), -a);
  };
  auto upper = [=](double u) {
    return std::pow(1.0 - u, b - 1.0) * std::pow(u, c - b - 1.0) * std::pow(v + (1.0 - v) * u, -a);
  };
  DyadicOptions o;
  o.rel_tol = tol;
  o.min_levels = 6;
  // convergent for c > b > 0; a log-flat stretch down to scale v is not a stall
  o.stall_count = 1 << 20;
  o.max_levels = 400;
  const DyadicResult lo = dyadic_left(lower, 0.0, 0.5, o);
  const DyadicResult hi = dyadic_left(upper, 0.0, 0.5, o);
  const double value = lo.value + hi.value;
  if (lo.divergent || hi.divergent || !std::isfinite(value)) {
    throw NumericalError("2F1 Euler integral did not converge", value, hi.divergent ? hi.trace : lo.trace);
  }
  return std::exp(std::lgamma(c) - std::lgamma(b) - std::lgamma(c - b)) * value;
}

// 2F1(a,b;c;1-v) for v in (0, 1/2) through the connection formula; v is passed
// directly so that it keeps full relative precision.
double near_one(double a, double b, double c, double v, double tol) {
  const double s = c - a - b;
  if (near_integer(s)) {
    if (s > 0.0) return series(a, b, c, 1.0 - v, tol, 10000000);
    if (c > b && b > 0.0) return euler_integral(a, b, c, v, tol);
    if (c > a && a > 0.0) return euler_integral(b, a, c, v, tol);
    throw NumericalError("2F1 near z=1 with integer c-a-b <= 0 needs c > a > 0 or c > b > 0", 0.0);
  }
  const double g1 = std::tgamma(c) * std::tgamma(s) * rgamma(c - a) * rgamma(c - b);
  const double g2 = std::tgamma(c) * std::tgamma(-s) * rgamma(a) * rgamma(b);
  double out = 0.0;
  if (g1 != 0.0) out += g1 * series(a, b, 1.0 - s, v, tol);
  if (g2 != 0.0) out += std::pow(v, s) * g2 * series(c - a, c - b, 1.0 + s, v, tol);
  return out;
}

}  // namespace

double rgamma(double x) {
  if (x <= 0.0 && near_integer(x)) return 0.0;
  return 1.0 / std::tgamma(x);
}

double hyp2f1(double a, double b, double c, double z, double tol) {
  if (!(z < 1.0)) throw std::domain_error("hyp2f1: argument must be below 1");
  if (c <= 0.0 && near_integer(c)) throw std::domain_error("hyp2f1: c is a non-positive integer");
  if (a == 0.0 || b == 0.0 || z == 0.0) return 1.0;
  if (std::abs(z) <= 0.5) return series(a, b, c, z, tol);
  if (z > 0.5) return near_one(a, b, c, 1.0 - z, tol);
  // Pfaff: 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)).
  const double w = z / (z - 1.0);
  const double pre = std::pow(1.0 - z, -a);
  if (c - b == 0.0) return pre;
  if (w <= 0.75) return pre * series(a, c - b, c, w, tol);
  return pre * near_one(a, c - b, c, 1.0 / (1.0 - z), tol);
}

}  // namespace fracvolt
