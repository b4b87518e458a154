// SPDX-License-Identifier: Apache-2.0
#include "irs/finite.hpp"

#include <stdexcept>

namespace irs {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double pitch(const LinkGeometry& g, int n, int side) { return g.aperture[n] / side; }

void check_sides(const LinkGeometry& g, const std::vector<int>& sides) {
  require(static_cast<int>(sides.size()) == g.N, "one meta-atom count per IRS is required");
  for (int L : sides) require(L >= 1, "meta-atom count must be >= 1");
}

}  // namespace

double meta_atom_spacing(double area_m2, int side, double wavelength_m) {
  require(area_m2 > 0 && side >= 1 && wavelength_m > 0, "invalid meta-atom grid");
  return std::sqrt(area_m2) / (side * wavelength_m);
}

int meta_atoms_per_side(double area_m2, double max_spacing, double wavelength_m) {
  require(max_spacing > 0, "meta-atom spacing must be > 0");
  const double ratio = std::sqrt(area_m2) / (wavelength_m * max_spacing);
  return std::max(1, static_cast<int>(std::ceil(ratio - 1e-9)));
}

std::vector<double> phase_profile(double phi1, double delta, double psi, double spacing, int side) {
  const double g = rotation_to_gradient(phi1, delta);
  const double c = 0.5 * (side - 1);
  std::vector<double> theta(side);
  for (int l = 0; l < side; ++l) theta[l] = 2.0 * kPi * g * spacing * (l - c) + psi;
  return theta;
}

double quantize_phase(double theta, int bits) {
  require(bits >= 1 && bits <= 30, "quantization bits must be in [1, 30]");
  const double levels = std::ldexp(1.0, bits);
  const double step = 2.0 * kPi / levels;
  const double w = theta - 2.0 * kPi * std::floor(theta / (2.0 * kPi));
  double i = std::nearbyint(w / step);
  if (i >= levels) i -= levels;
  return i * step;
}

std::vector<double> quantize_profile(const std::vector<double>& theta, int bits) {
  std::vector<double> q(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) q[i] = quantize_phase(theta[i], bits);
  return q;
}

cplx irs_response(double spacing, double phi1, double phi2, const std::vector<double>& theta) {
  const int L = static_cast<int>(theta.size());
  require(L >= 1, "phase profile must be non-empty");
  const double c = 0.5 * (L - 1);
  const double k = 2.0 * kPi * spacing * (std::sin(phi2) - std::sin(phi1));
  cplx sum{};
  for (int l = 0; l < L; ++l) sum += std::polar(1.0, theta[l] + k * (l - c));
  return sum / static_cast<double>(L);
}

cplx irs_response_linear(double spacing, int side, double s, double psi) {
  return std::polar(dirichlet_ratio(spacing, side, s), psi);
}

PhaseProfiles profiles_for(const LinkGeometry& g, const ControlVector& xi,
                           const std::vector<int>& sides) {
  xi.check(g.N, g.K);
  check_sides(g, sides);
  PhaseProfiles out;
  for (int n = 0; n < g.N; ++n)
    out.push_back(phase_profile(g.phi1[n], xi.delta(n), xi.psi(n), pitch(g, n, sides[n]), sides[n]));
  return out;
}

Eigen::RowVectorXcd finite_row_closed(const LinkGeometry& g, const ControlVector& xi, int k,
                                      const std::vector<int>& sides) {
  xi.check(g.N, g.K);
  check_sides(g, sides);
  Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(g.M1);
  for (int n = 0; n < g.N; ++n) {
    const double D = pitch(g, n, sides[n]);
    cplx t{};
    for (int p = 0; p <= g.P; ++p) {
      const auto& r = g.ray(k, n, p);
      const double b = dirichlet_ratio(g.ue_spacing[k], g.ue_elements[k],
                                       std::sin(xi.alpha(k)) - std::sin(r.zeta));
      t += r.gain * b *
           irs_response_linear(D, sides[n], misalignment(g.phi1[n], r.phi2, xi.delta(n)), xi.psi(n));
    }
    row += (g.c1[n] * t) * g.V1.col(n).adjoint();
  }
  row += wall_entry(g, k, xi.alpha(k)) * g.V3.col(k).adjoint();
  return row;
}

FiniteIrsMatrices finite_matrices(const LinkGeometry& g, int k, int n, int side,
                                  const std::vector<double>& theta) {
  require(static_cast<int>(theta.size()) == side, "profile length must equal L");
  const double D = pitch(g, n, side);
  const Eigen::VectorXcd rows = Eigen::VectorXcd::Constant(side, 1.0 / std::sqrt(double(side)));
  auto planar = [&](double angle) -> Eigen::VectorXcd {
    // Row index outer, column index inner: u = (1/sqrt L) 1_L (x) s(D, L, angle).
    const Eigen::VectorXcd col = steering_vector(D, side, angle);
    Eigen::VectorXcd u(side * side);
    for (int r = 0; r < side; ++r) u.segment(r * side, side) = rows(r) * col;
    return u;
  };
  FiniteIrsMatrices f;
  f.H1 = g.c1[n] * planar(g.phi1[n]) * g.V1.col(n).adjoint();
  f.theta_bar.resize(side * side);
  for (int r = 0; r < side; ++r)
    for (int l = 0; l < side; ++l) f.theta_bar(r * side + l) = std::polar(1.0, theta[l]);
  for (int p = 0; p <= g.P; ++p) {
    const auto& ray = g.ray(k, n, p);
    const Eigen::VectorXcd w = steering_vector(g.ue_spacing[k], g.ue_elements[k], ray.zeta);
    f.H2.push_back(ray.gain * w * planar(ray.phi2).adjoint());
  }
  return f;
}

Eigen::RowVectorXcd finite_row_explicit(const LinkGeometry& g, const ControlVector& xi, int k,
                                        const std::vector<int>& sides) {
  const PhaseProfiles prof = profiles_for(g, xi, sides);
  const Eigen::VectorXcd f = steering_vector(g.ue_spacing[k], g.ue_elements[k], xi.alpha(k));
  Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(g.M1);
  for (int n = 0; n < g.N; ++n) {
    const FiniteIrsMatrices m = finite_matrices(g, k, n, sides[n], prof[n]);
    const Eigen::MatrixXcd cascade = m.theta_bar.asDiagonal() * m.H1;
    for (const auto& h2 : m.H2) row += f.adjoint() * (h2 * cascade);
  }
  if (g.t3[k] != cplx{}) {
    const Eigen::VectorXcd w3 = steering_vector(g.ue_spacing[k], g.ue_elements[k], g.zeta3[k]);
    const Eigen::MatrixXcd H3 = g.t3[k] * w3 * g.V3.col(k).adjoint();
    row += f.adjoint() * H3;
  }
  return row;
}

Eigen::MatrixXcd finite_channel(const LinkGeometry& g, const Eigen::VectorXd& alpha,
                                const PhaseProfiles& profiles) {
  require(alpha.size() == g.K, "alpha must have K entries");
  require(static_cast<int>(profiles.size()) == g.N, "one phase profile per IRS is required");
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(g.K, g.M1);
  for (int k = 0; k < g.K; ++k) {
    for (int n = 0; n < g.N; ++n) {
      const int L = static_cast<int>(profiles[n].size());
      const double D = pitch(g, n, L);
      cplx t{};
      for (int p = 0; p <= g.P; ++p) {
        const auto& r = g.ray(k, n, p);
        if (r.gain == cplx{}) continue;
        const double b = dirichlet_ratio(g.ue_spacing[k], g.ue_elements[k],
                                         std::sin(alpha(k)) - std::sin(r.zeta));
        t += r.gain * b * irs_response(D, g.phi1[n], r.phi2, profiles[n]);
      }
      H.row(k) += (g.c1[n] * t) * g.V1.col(n).adjoint();
    }
    H.row(k) += wall_entry(g, k, alpha(k)) * g.V3.col(k).adjoint();
  }
  return H;
}

}  // namespace irs
