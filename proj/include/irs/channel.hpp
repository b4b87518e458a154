// SPDX-License-Identifier: Apache-2.0
//
// Sparse downlink channel: steering vectors, per-link path gains, the
// beam-misalignment factors, and the asymptotic (large-IRS) factored channel
//
//   H = M Psi V1^H + T V3^H,
//
// with M (K x N) the IRS-routed gains, Psi = diag(exp(j psi)), T (K) the
// wall-path gains and V1, V3 the BS steering vectors towards IRSs and wall.
#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "irs/scene.hpp"
#include "irs/special.hpp"

namespace irs {

/// Unit-norm ULA response: entry m = exp(j pi D (M-1) sin b) exp(-j 2 pi D m sin b) / sqrt(M).
Eigen::VectorXcd steering_vector(double spacing, int elements, double angle);

/// Optimization variables: IRS rotations delta[N], IRS phases psi[N], UE beams alpha[K].
struct ControlVector {
  Eigen::VectorXd delta;
  Eigen::VectorXd psi;
  Eigen::VectorXd alpha;

  static ControlVector zeros(int n_irs, int n_ue);
  int num_irs() const { return static_cast<int>(delta.size()); }
  int num_ues() const { return static_cast<int>(alpha.size()); }
  /// Throws std::invalid_argument on size mismatch or non-finite entries.
  void check(int n_irs, int n_ue) const;
};

/// One random draw of the propagation environment. Index order is [k][n][p].
struct ChannelRealization {
  std::vector<Point2> ue_positions;
  std::vector<std::vector<std::vector<Point2>>> reflectors;  // P per (k, n)
  std::vector<std::vector<std::vector<double>>> a2;          // P + 1 per (k, n), p = 0 is LoS
  std::vector<std::vector<std::vector<cplx>>> rho;           // P per (k, n)
  std::vector<double> a3;                                    // K
  std::vector<double> a1;                                    // N, empty means unfaded

  /// Deterministic realization: UEs at the scene positions, no reflectors, unit shadowing.
  static ChannelRealization nominal(const Scene& scene);
  int paths() const;
  /// Copy with all NLoS reflectors removed.
  ChannelRealization line_of_sight_only() const;
  void check(const Scene& scene) const;
};

/// exp(-j 2 pi d / lambda) exp(-kappa d).
cplx propagation_factor(const RadioParams& radio, double distance);

/// BS -> IRS n LoS gain c1 (unfaded; a1 = 1).
cplx path_gain_bs_irs(const Scene& scene, int n);
/// IRS n -> UE k gain c2 along path p (p = 0 LoS), excluding the shadowing a2.
cplx path_gain_irs_ue(const Scene& scene, const ChannelRealization& real, int k, int n, int p);
/// BS -> wall -> UE k gain c3, excluding the shadowing a3. Zero without a wall path.
cplx path_gain_wall(const Scene& scene, const ChannelRealization& real, int k);

/// Phase gradient that steers a wave arriving at phi1 to depart at phi1 - 2 delta.
double rotation_to_gradient(double phi1, double delta);
/// Pointing error s = sin(phi1 - 2 delta) - sin(phi2).
double misalignment(double phi1, double phi2, double delta);

/// Geometry and gains of every link, independent of the control vector.
/// AoD convention at the IRS: phi2 = phi1 for specular reflection.
struct LinkGeometry {
  struct Ray {
    double phi2 = 0.0;  // AoD at the IRS
    double zeta = 0.0;  // AoA at the UE
    cplx gain{};        // a2 * c2, zero when the IRS front face is not involved
  };

  int K = 0;
  int N = 0;
  int P = 0;
  int M1 = 0;
  double bs_spacing = 0.5;
  std::vector<double> phi1;      // AoA of the BS signal at each IRS
  std::vector<double> aperture;  // sqrt(A_n) / lambda
  std::vector<cplx> c1;
  Eigen::MatrixXcd V1;           // M1 x N
  std::vector<Ray> rays;         // K * N * (P + 1)
  std::vector<int> ue_elements;
  std::vector<double> ue_spacing;
  std::vector<double> zeta3;     // wall AoA at each UE
  std::vector<double> incidence; // wall incidence angle
  std::vector<cplx> t3;          // a3 * c3, zero without wall path
  Eigen::MatrixXcd V3;           // M1 x K

  const Ray& ray(int k, int n, int p) const { return rays[(k * N + n) * (P + 1) + p]; }
  bool has_wall() const;
};

LinkGeometry build_links(const Scene& scene, const ChannelRealization& real,
                         bool los_only = false);

struct AsymptoticChannel {
  Eigen::MatrixXcd M;   // K x N
  Eigen::VectorXcd T;   // diagonal of the K x K wall matrix
  Eigen::MatrixXcd V1;  // M1 x N
  Eigen::MatrixXcd V3;  // M1 x K
  Eigen::VectorXd psi;  // Psi = diag(exp(j psi))

  Eigen::MatrixXcd H() const;
};

AsymptoticChannel asymptotic_channel(const LinkGeometry& links, const ControlVector& xi);
AsymptoticChannel asymptotic_channel(const Scene& scene, const ChannelRealization& real,
                                     const ControlVector& xi);

/// Entry [M]_{k,n} for arbitrary (delta_n, alpha_k).
cplx irs_entry(const LinkGeometry& links, int k, int n, double delta, double alpha);
/// Wall entry [T]_{k,k} for beam direction alpha_k.
cplx wall_entry(const LinkGeometry& links, int k, double alpha);

/// M, T and their partial derivatives in delta_n and alpha_k.
struct ChannelJets {
  Eigen::MatrixXcd M, M_d, M_dd, M_a, M_aa, M_da;  // K x N
  Eigen::VectorXcd T, T_a, T_aa;                   // K
};
ChannelJets channel_jets(const LinkGeometry& links, const ControlVector& xi);

struct PatternSample {
  double angle = 0.0;  // radians
  double gain = 0.0;   // linear, normalized to the grid maximum
  double gain_db = 0.0;
};

/// Normalized power pattern cos(phi2) sinc^2(sqrt(A)/lambda (sin(phi1 - 2 delta) - sin phi2))
/// of IRS n versus departure angle.
std::vector<PatternSample> irs_radiation_pattern(const Scene& scene, int n, double delta,
                                                 const std::vector<double>& angles);
/// CSV with header angle_deg,gain_db.
void write_pattern_csv(std::ostream& os, const std::vector<PatternSample>& samples);

/// Evenly spaced grid of `count` angles in [lo, hi].
std::vector<double> angle_grid(double lo, double hi, int count);

}  // namespace irs
