// SPDX-License-Identifier: Apache-2.0
//
// Array-factor special functions with first and second derivatives, stable
// across their removable singularities.
#pragma once

namespace irs {

/// Value and first two derivatives of a scalar function at one point.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// sin(y)/y and its derivatives in y.
Jet sin_over(double y);

/// sinc(x) = sin(pi x)/(pi x), sinc(0) = 1.
double sinc(double x);
/// sinc and its derivatives in x.
Jet sinc_jet(double x);

/// sin(pi Delta M u) / (M sin(pi Delta u)), the ULA misalignment factor.
/// Equal to +-1 at the grating points where both sines vanish.
double dirichlet_ratio(double delta, int m, double u);
/// Dirichlet ratio and its derivatives in u.
Jet dirichlet_jet(double delta, int m, double u);

}  // namespace irs
