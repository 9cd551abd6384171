#include "jlie/special.hpp"

#include <cmath>
#include <limits>

namespace jlie {

namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kEps = 1e-17;

// -gamma - ln|u| - sum_{k>=1} (-u)^k / (k k!)
double series(double u) {
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < 300; ++k) {
    term *= -u / k;
    double add = term / k;
    sum += add;
    if (std::fabs(add) < kEps * std::fabs(sum)) break;
  }
  return -kEulerGamma - std::log(std::fabs(u)) - sum;
}

// Modified Lentz on the continued fraction of E1 for u > 4.
double continued_fraction(double u) {
  constexpr double tiny = 1e-300;
  double b = u + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 1000; ++i) {
    double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h * std::exp(-u);
}

// Ei(x) for large positive x, e^x/x * sum k!/x^k truncated at the smallest term.
double ei_asymptotic(double x) {
  double sum = 1.0;
  double term = 1.0;
  for (int k = 1; k < 100; ++k) {
    double next = term * k / x;
    if (next > term) break;
    term = next;
    sum += term;
    if (term < kEps * sum) break;
  }
  return std::exp(x) / x * sum;
}

}  // namespace

double expint1(double u) {
  if (u == 0.0) return std::numeric_limits<double>::infinity();
  if (std::isnan(u)) return u;
  if (std::fabs(u) <= 4.0) return series(u);
  if (u > 0.0) return continued_fraction(u);
  double x = -u;
  if (x > 40.0) return -ei_asymptotic(x);
  return series(u);
}

}  // namespace jlie
