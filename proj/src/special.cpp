// SPDX-License-Identifier: Apache-2.0
#include "irs/special.hpp"

#include <cmath>
#include <numbers>

namespace irs {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesLimit = 0.5;
constexpr int kSeriesTerms = 8;

}  // namespace

Jet sin_over(double y) {
  if (std::abs(y) < kSeriesLimit) {
    // sum_i (-1)^i y^(2i) / (2i+1)!, differentiated termwise; truncation < 1e-16.
    Jet j;
    const double y2 = y * y;
    double pow_2i = 1.0;  // y^(2i)
    double pow_prev = 0.0;  // y^(2i-2)
    double fact = 1.0;    // (2i+1)!
    double sign = 1.0;
    for (int i = 0; i < kSeriesTerms; ++i) {
      if (i > 0) {
        fact *= (2.0 * i) * (2.0 * i + 1.0);
        sign = -sign;
        j.d1 += sign * 2.0 * i * pow_prev * y / fact;
        j.d2 += sign * 2.0 * i * (2.0 * i - 1.0) * pow_prev / fact;
      }
      j.v += sign * pow_2i / fact;
      pow_prev = pow_2i;
      pow_2i *= y2;
    }
    return j;
  }
  const double s = std::sin(y);
  const double c = std::cos(y);
  return {s / y, (y * c - s) / (y * y), (2.0 * s - 2.0 * y * c - y * y * s) / (y * y * y)};
}

double sinc(double x) { return sinc_jet(x).v; }

Jet sinc_jet(double x) {
  const Jet s = sin_over(kPi * x);
  return {s.v, kPi * s.d1, kPi * kPi * s.d2};
}

double dirichlet_ratio(double delta, int m, double u) { return dirichlet_jet(delta, m, u).v; }

Jet dirichlet_jet(double delta, int m, double u) {
  if (m == 1) return {1.0, 0.0, 0.0};
  // x = n pi + e with |e| <= pi/2, so that
  // sin(M x)/(M sin x) = (-1)^(n(M-1)) * S(M e)/S(e), S(y) = sin(y)/y.
  const double x = kPi * delta * u;
  const double n = std::nearbyint(x / kPi);
  const double e = x - n * kPi;
  const double sign = (std::fmod(std::abs(n) * (m - 1), 2.0) == 0.0) ? 1.0 : -1.0;
  const double mm = static_cast<double>(m);
  const Jet num = sin_over(mm * e);
  const Jet den = sin_over(e);
  // Derivatives in e of p(e) = S(Me), q(e) = S(e).
  const double p = num.v, p1 = mm * num.d1, p2 = mm * mm * num.d2;
  const double q = den.v, q1 = den.d1, q2 = den.d2;
  const double r = p / q;
  const double r1 = (p1 - r * q1) / q;
  const double r2 = (p2 - 2.0 * r1 * q1 - r * q2) / q;
  const double k = kPi * delta;  // de/du
  return {sign * r, sign * k * r1, sign * k * k * r2};
}

}  // namespace irs
