// SPDX-License-Identifier: Apache-2.0
#include "irs/channel.hpp"

#include <ostream>
#include <sstream>

#include "irs/log.hpp"

namespace irs {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

UeSpec ue_at(const Scene& scene, const ChannelRealization& real, int k) {
  UeSpec u = scene.ues.at(k);
  if (!real.ue_positions.empty()) u.position = real.ue_positions.at(k);
  return u;
}

double shadow_a1(const ChannelRealization& real, int n) {
  return real.a1.empty() ? 1.0 : real.a1.at(n);
}

// Aperture factor sqrt(M A cos(phi) / (4 pi)) / d.
double aperture_amplitude(int elements, double area, double angle, double d) {
  const double c = std::cos(angle);
  if (c <= 0.0) return 0.0;
  return std::sqrt(elements * area * c / (4.0 * kPi)) / d;
}

struct DirJet {
  double v, a, aa;
};

// Dirichlet misalignment gain of a UE beam alpha against arrival angle zeta.
DirJet ue_beam(double spacing, int elements, double alpha, double zeta) {
  const Jet d = dirichlet_jet(spacing, elements, std::sin(alpha) - std::sin(zeta));
  const double ca = std::cos(alpha);
  const double sa = std::sin(alpha);
  return {d.v, d.d1 * ca, d.d2 * ca * ca - d.d1 * sa};
}

}  // namespace

Eigen::VectorXcd steering_vector(double spacing, int elements, double angle) {
  require(elements >= 1, "steering vector needs at least one element");
  require(spacing > 0, "steering vector spacing must be > 0");
  const double sb = std::sin(angle);
  const double norm = 1.0 / std::sqrt(static_cast<double>(elements));
  Eigen::VectorXcd v(elements);
  for (int m = 0; m < elements; ++m) {
    v(m) = norm * std::polar(1.0, kPi * spacing * (elements - 1 - 2.0 * m) * sb);
  }
  return v;
}

ControlVector ControlVector::zeros(int n_irs, int n_ue) {
  return {Eigen::VectorXd::Zero(n_irs), Eigen::VectorXd::Zero(n_irs), Eigen::VectorXd::Zero(n_ue)};
}

void ControlVector::check(int n_irs, int n_ue) const {
  if (delta.size() != n_irs || psi.size() != n_irs || alpha.size() != n_ue) {
    std::ostringstream os;
    os << "control vector dimensions (" << delta.size() << ", " << psi.size() << ", "
       << alpha.size() << ") do not match (N, N, K) = (" << n_irs << ", " << n_irs << ", "
       << n_ue << ")";
    throw std::invalid_argument(os.str());
  }
  require(delta.allFinite() && psi.allFinite() && alpha.allFinite(),
          "control vector entries must be finite");
}

ChannelRealization ChannelRealization::nominal(const Scene& scene) {
  const int K = scene.num_ues();
  const int N = scene.num_irs();
  ChannelRealization r;
  for (const auto& u : scene.ues) r.ue_positions.push_back(u.position);
  r.reflectors.assign(K, std::vector<std::vector<Point2>>(N));
  r.rho.assign(K, std::vector<std::vector<cplx>>(N));
  r.a2.assign(K, std::vector<std::vector<double>>(N, std::vector<double>(1, 1.0)));
  r.a3.assign(K, 1.0);
  return r;
}

int ChannelRealization::paths() const {
  if (reflectors.empty() || reflectors.front().empty()) return 0;
  return static_cast<int>(reflectors.front().front().size());
}

ChannelRealization ChannelRealization::line_of_sight_only() const {
  ChannelRealization r = *this;
  for (auto& per_k : r.reflectors)
    for (auto& per_n : per_k) per_n.clear();
  for (auto& per_k : r.rho)
    for (auto& per_n : per_k) per_n.clear();
  for (auto& per_k : r.a2)
    for (auto& per_n : per_k) per_n.resize(1);
  return r;
}

void ChannelRealization::check(const Scene& scene) const {
  const std::size_t K = scene.ues.size();
  const std::size_t N = scene.irs.size();
  require(ue_positions.empty() || ue_positions.size() == K, "realization: ue_positions size != K");
  require(reflectors.size() == K && a2.size() == K && rho.size() == K && a3.size() == K,
          "realization: per-UE arrays must have K entries");
  require(a1.empty() || a1.size() == N, "realization: a1 must be empty or have N entries");
  const int P = paths();
  for (std::size_t k = 0; k < K; ++k) {
    require(reflectors[k].size() == N && a2[k].size() == N && rho[k].size() == N,
            "realization: per-link arrays must have N entries");
    require(a3[k] > 0, "realization: shadowing must be > 0");
    for (std::size_t n = 0; n < N; ++n) {
      require(static_cast<int>(reflectors[k][n].size()) == P &&
                  static_cast<int>(rho[k][n].size()) == P &&
                  static_cast<int>(a2[k][n].size()) == P + 1,
              "realization: every link needs P reflectors and P+1 shadowing values");
      for (double a : a2[k][n]) require(a > 0, "realization: shadowing must be > 0");
      for (cplx r : rho[k][n]) require(std::abs(r) <= 1.0 + 1e-12, "realization: |rho| must be <= 1");
    }
  }
  for (double a : a1) require(a > 0, "realization: shadowing must be > 0");
}

cplx propagation_factor(const RadioParams& radio, double distance) {
  return std::polar(std::exp(-radio.absorption_per_m * distance),
                    -2.0 * kPi * distance / radio.wavelength_m);
}

cplx path_gain_bs_irs(const Scene& scene, int n) {
  const IrsSpec& irs = scene.irs.at(n);
  const PathAngles p = los_path(pose_of(scene.bs), pose_of(irs));
  if (!p.illuminated) {
    warn("IRS " + std::to_string(n) + " is not illuminated by the BS");
    return {};
  }
  return aperture_amplitude(scene.bs.elements, irs.area_m2, p.arrival, p.length) *
         propagation_factor(scene.radio, p.length);
}

cplx path_gain_irs_ue(const Scene& scene, const ChannelRealization& real, int k, int n, int p) {
  const IrsSpec& irs = scene.irs.at(n);
  const UeSpec ue = ue_at(scene, real, k);
  PathAngles path;
  cplx rho{1.0, 0.0};
  if (p == 0) {
    path = los_path(pose_of(irs), pose_of(ue));
  } else {
    path = reflector_path(irs, real.reflectors.at(k).at(n).at(p - 1), ue);
    rho = real.rho.at(k).at(n).at(p - 1);
  }
  if (!path.illuminated) {
    warn("UE " + std::to_string(k) + " path " + std::to_string(p) + " leaves IRS " +
         std::to_string(n) + " from its back face");
    return {};
  }
  return scene.radio.irs_reflection * rho *
         aperture_amplitude(ue.elements, irs.area_m2, path.departure, path.length) *
         propagation_factor(scene.radio, path.length);
}

cplx path_gain_wall(const Scene& scene, const ChannelRealization& real, int k) {
  if (!scene.wall) return {};
  const UeSpec ue = ue_at(scene, real, k);
  const auto w = wall_image_path(scene.bs, ue, *scene.wall);
  if (!w) return {};
  const cplx rho = wall_reflection_coefficient(*scene.wall, w->incidence);
  const double lambda = scene.radio.wavelength_m;
  return rho * std::sqrt(static_cast<double>(ue.elements) * scene.bs.elements * lambda * lambda) /
         (4.0 * kPi * w->path.length) * propagation_factor(scene.radio, w->path.length);
}

double rotation_to_gradient(double phi1, double delta) {
  return std::sin(phi1) - std::sin(phi1 - 2.0 * delta);
}

double misalignment(double phi1, double phi2, double delta) {
  return std::sin(phi1 - 2.0 * delta) - std::sin(phi2);
}

bool LinkGeometry::has_wall() const {
  for (cplx t : t3)
    if (t != cplx{}) return true;
  return false;
}

LinkGeometry build_links(const Scene& scene, const ChannelRealization& real, bool los_only) {
  scene.validate();
  real.check(scene);
  LinkGeometry g;
  g.K = scene.num_ues();
  g.N = scene.num_irs();
  g.P = los_only ? 0 : real.paths();
  g.M1 = scene.bs.elements;
  g.bs_spacing = scene.bs.spacing;
  const double lambda = scene.radio.wavelength_m;

  g.V1.resize(g.M1, g.N);
  for (int n = 0; n < g.N; ++n) {
    const IrsSpec& irs = scene.irs[n];
    const PathAngles p = los_path(pose_of(scene.bs), pose_of(irs));
    g.phi1.push_back(p.arrival);
    g.aperture.push_back(std::sqrt(irs.area_m2) / lambda);
    g.c1.push_back(shadow_a1(real, n) * path_gain_bs_irs(scene, n));
    g.V1.col(n) = steering_vector(scene.bs.spacing, g.M1, p.departure);
  }

  g.rays.resize(static_cast<std::size_t>(g.K) * g.N * (g.P + 1));
  g.V3 = Eigen::MatrixXcd::Zero(g.M1, g.K);
  for (int k = 0; k < g.K; ++k) {
    const UeSpec ue = ue_at(scene, real, k);
    g.ue_elements.push_back(ue.elements);
    g.ue_spacing.push_back(ue.spacing);
    for (int n = 0; n < g.N; ++n) {
      const IrsSpec& irs = scene.irs[n];
      for (int p = 0; p <= g.P; ++p) {
        const PathAngles path = p == 0
                                    ? los_path(pose_of(irs), pose_of(ue))
                                    : reflector_path(irs, real.reflectors[k][n][p - 1], ue);
        LinkGeometry::Ray& r = g.rays[(k * g.N + n) * (g.P + 1) + p];
        r.phi2 = -path.departure;
        r.zeta = path.arrival;
        r.gain = real.a2[k][n][p] * path_gain_irs_ue(scene, real, k, n, p);
      }
    }
    double zeta3 = 0.0, incidence = 0.0;
    cplx t3{};
    if (scene.wall) {
      if (const auto w = wall_image_path(scene.bs, ue, *scene.wall)) {
        zeta3 = w->path.arrival;
        incidence = w->incidence;
        t3 = real.a3[k] * path_gain_wall(scene, real, k);
        g.V3.col(k) = steering_vector(scene.bs.spacing, g.M1, w->path.departure);
      }
    }
    if (t3 == cplx{}) g.V3.col(k) = steering_vector(scene.bs.spacing, g.M1, 0.0);
    g.zeta3.push_back(zeta3);
    g.incidence.push_back(incidence);
    g.t3.push_back(t3);
  }
  return g;
}

Eigen::MatrixXcd AsymptoticChannel::H() const {
  Eigen::VectorXcd phase(psi.size());
  for (Eigen::Index n = 0; n < psi.size(); ++n) phase(n) = std::polar(1.0, psi(n));
  return M * phase.asDiagonal() * V1.adjoint() + T.asDiagonal() * V3.adjoint();
}

cplx irs_entry(const LinkGeometry& g, int k, int n, double delta, double alpha) {
  cplx sum{};
  for (int p = 0; p <= g.P; ++p) {
    const auto& r = g.ray(k, n, p);
    if (r.gain == cplx{}) continue;
    const double b = dirichlet_ratio(g.ue_spacing[k], g.ue_elements[k],
                                     std::sin(alpha) - std::sin(r.zeta));
    sum += r.gain * b * sinc(g.aperture[n] * misalignment(g.phi1[n], r.phi2, delta));
  }
  return g.c1[n] * sum;
}

cplx wall_entry(const LinkGeometry& g, int k, double alpha) {
  if (g.t3[k] == cplx{}) return {};
  return g.t3[k] * dirichlet_ratio(g.ue_spacing[k], g.ue_elements[k],
                                   std::sin(alpha) - std::sin(g.zeta3[k]));
}

AsymptoticChannel asymptotic_channel(const LinkGeometry& g, const ControlVector& xi) {
  xi.check(g.N, g.K);
  AsymptoticChannel ch;
  ch.M.resize(g.K, g.N);
  ch.T.resize(g.K);
  for (int k = 0; k < g.K; ++k) {
    for (int n = 0; n < g.N; ++n) ch.M(k, n) = irs_entry(g, k, n, xi.delta(n), xi.alpha(k));
    ch.T(k) = wall_entry(g, k, xi.alpha(k));
  }
  ch.V1 = g.V1;
  ch.V3 = g.V3;
  ch.psi = xi.psi;
  return ch;
}

AsymptoticChannel asymptotic_channel(const Scene& scene, const ChannelRealization& real,
                                     const ControlVector& xi) {
  return asymptotic_channel(build_links(scene, real), xi);
}

ChannelJets channel_jets(const LinkGeometry& g, const ControlVector& xi) {
  xi.check(g.N, g.K);
  ChannelJets j;
  for (auto* m : {&j.M, &j.M_d, &j.M_dd, &j.M_a, &j.M_aa, &j.M_da}) *m = Eigen::MatrixXcd::Zero(g.K, g.N);
  j.T = Eigen::VectorXcd::Zero(g.K);
  j.T_a = Eigen::VectorXcd::Zero(g.K);
  j.T_aa = Eigen::VectorXcd::Zero(g.K);
  for (int n = 0; n < g.N; ++n) {
    const double arg = g.phi1[n] - 2.0 * xi.delta(n);
    const double x1 = -2.0 * g.aperture[n] * std::cos(arg);  // dx/d delta
    const double x2 = -4.0 * g.aperture[n] * std::sin(arg);  // d2x/d delta2
    for (int k = 0; k < g.K; ++k) {
      cplx m{}, md{}, mdd{}, ma{}, maa{}, mda{};
      for (int p = 0; p <= g.P; ++p) {
        const auto& r = g.ray(k, n, p);
        if (r.gain == cplx{}) continue;
        const DirJet b = ue_beam(g.ue_spacing[k], g.ue_elements[k], xi.alpha(k), r.zeta);
        const Jet s = sinc_jet(g.aperture[n] * (std::sin(arg) - std::sin(r.phi2)));
        const double sd = s.d1 * x1;
        const double sdd = s.d2 * x1 * x1 + s.d1 * x2;
        m += r.gain * (b.v * s.v);
        md += r.gain * (b.v * sd);
        mdd += r.gain * (b.v * sdd);
        ma += r.gain * (b.a * s.v);
        maa += r.gain * (b.aa * s.v);
        mda += r.gain * (b.a * sd);
      }
      j.M(k, n) = g.c1[n] * m;
      j.M_d(k, n) = g.c1[n] * md;
      j.M_dd(k, n) = g.c1[n] * mdd;
      j.M_a(k, n) = g.c1[n] * ma;
      j.M_aa(k, n) = g.c1[n] * maa;
      j.M_da(k, n) = g.c1[n] * mda;
    }
  }
  for (int k = 0; k < g.K; ++k) {
    if (g.t3[k] == cplx{}) continue;
    const DirJet b = ue_beam(g.ue_spacing[k], g.ue_elements[k], xi.alpha(k), g.zeta3[k]);
    j.T(k) = g.t3[k] * b.v;
    j.T_a(k) = g.t3[k] * b.a;
    j.T_aa(k) = g.t3[k] * b.aa;
  }
  return j;
}

std::vector<PatternSample> irs_radiation_pattern(const Scene& scene, int n, double delta,
                                                 const std::vector<double>& angles) {
  const IrsSpec& irs = scene.irs.at(n);
  const double phi1 = los_path(pose_of(scene.bs), pose_of(irs)).arrival;
  const double ap = std::sqrt(irs.area_m2) / scene.radio.wavelength_m;
  std::vector<PatternSample> out;
  double peak = 0.0;
  for (double a : angles) {
    if (!(std::abs(a) < kPi / 2)) throw std::invalid_argument("pattern angles must lie in (-90, 90) deg");
    const double s = sinc(ap * misalignment(phi1, a, delta));
    out.push_back({a, std::cos(a) * s * s, 0.0});
    peak = std::max(peak, out.back().gain);
  }
  for (auto& p : out) {
    if (peak > 0) p.gain /= peak;
    p.gain_db = 10.0 * std::log10(std::max(p.gain, 1e-30));
  }
  return out;
}

void write_pattern_csv(std::ostream& os, const std::vector<PatternSample>& samples) {
  os << "angle_deg,gain_db\n";
  os.precision(10);
  for (const auto& s : samples) os << rad2deg(s.angle) << ',' << s.gain_db << '\n';
}

std::vector<double> angle_grid(double lo, double hi, int count) {
  require(count >= 2, "angle grid needs at least two points");
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
  return g;
}

}  // namespace irs
