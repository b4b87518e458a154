// SPDX-License-Identifier: Apache-2.0
//
// Finite IRS of L x L meta-atoms. The panel area stays fixed, so the
// meta-atom pitch is sqrt(A) / (L lambda) wavelengths. In-plane geometry makes
// the response depend on the column index only, with per-column phase
//
//   theta_l = 2 pi g D (l - (L-1)/2) + psi,   g = sin(phi1) - sin(phi1 - 2 delta).
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "irs/channel.hpp"

namespace irs {

/// Meta-atom pitch in wavelengths for an L x L panel of area A.
double meta_atom_spacing(double area_m2, int side, double wavelength_m);
/// Smallest L whose pitch does not exceed `max_spacing` wavelengths.
int meta_atoms_per_side(double area_m2, double max_spacing, double wavelength_m);

/// Column phases of a linear-gradient configuration.
std::vector<double> phase_profile(double phi1, double delta, double psi, double spacing, int side);

/// Nearest level of {2 pi i / 2^bits}, returned in [0, 2 pi).
double quantize_phase(double theta, int bits);
std::vector<double> quantize_profile(const std::vector<double>& theta, int bits);

/// u2^H Theta u1 for an arbitrary column profile (direct sum).
cplx irs_response(double spacing, double phi1, double phi2, const std::vector<double>& theta);
/// Closed form exp(j psi) sin(pi D L s) / (L sin(pi D s)) for a linear profile.
cplx irs_response_linear(double spacing, int side, double s, double psi);

/// Per-IRS column phase profiles; one vector of length L_n per IRS.
using PhaseProfiles = std::vector<std::vector<double>>;

/// Linear-gradient profiles for every IRS at the given control vector.
PhaseProfiles profiles_for(const LinkGeometry& links, const ControlVector& xi,
                           const std::vector<int>& sides);

/// Row f_k^H H_k of the finite channel via the closed-form sum.
Eigen::RowVectorXcd finite_row_closed(const LinkGeometry& links, const ControlVector& xi, int k,
                                      const std::vector<int>& sides);

/// Row via explicit per-meta-atom matrices H1 (L^2 x M1), Theta-bar (L^2 x L^2),
/// H2 (M2 x L^2), H3 (M2 x M1) and the UE combiner f_k. Cost grows as L^2; for
/// cross-checking at small L.
Eigen::RowVectorXcd finite_row_explicit(const LinkGeometry& links, const ControlVector& xi, int k,
                                        const std::vector<int>& sides);

/// Full K x M1 finite channel for arbitrary profiles; psi is carried by the profiles.
Eigen::MatrixXcd finite_channel(const LinkGeometry& links, const Eigen::VectorXd& alpha,
                                const PhaseProfiles& profiles);

/// Explicit per-meta-atom matrices for one IRS/UE pair, exposed for inspection.
struct FiniteIrsMatrices {
  Eigen::MatrixXcd H1;          // L^2 x M1, rank one
  Eigen::VectorXcd theta_bar;   // diagonal of Theta-bar, unit magnitude
  std::vector<Eigen::MatrixXcd> H2;  // per path, M2 x L^2
};
FiniteIrsMatrices finite_matrices(const LinkGeometry& links, int k, int n, int side,
                                  const std::vector<double>& theta);

}  // namespace irs
