// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>
#include <sstream>

#include "irs/assignment.hpp"
#include "irs/channel.hpp"
#include "irs/finite.hpp"
#include "irs/harness.hpp"
#include "irs/special.hpp"

using namespace irs;

namespace {

Scene single_link_scene(double area, int m1, int m2, bool wall) {
  ReferenceLayout l;
  l.irs_area_m2 = area;
  l.bs_elements = m1;
  l.ue_elements = m2;
  l.wall = wall;
  return make_reference_scene(l);
}

double fd(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace

TEST_CASE("sin_over and sinc: values and derivatives across the series switch") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(std::abs(sinc(1.0)) < 1e-16);
  CHECK(sinc(0.5) == doctest::Approx(2.0 / kPi).epsilon(1e-15));
  for (double y : {-3.0, -0.49, -0.1, 0.0, 1e-9, 0.3, 0.4999, 0.5001, 2.0, 7.5}) {
    const Jet j = sin_over(y);
    const double ref = y == 0.0 ? 1.0 : std::sin(y) / y;
    CHECK(j.v == doctest::Approx(ref).epsilon(1e-15));
    CHECK(j.d1 == doctest::Approx(fd([](double t) { return sin_over(t).v; }, y)).epsilon(1e-7));
    CHECK(j.d2 == doctest::Approx(fd([](double t) { return sin_over(t).d1; }, y)).epsilon(1e-6));
  }
}

TEST_CASE("dirichlet_ratio: reference values") {
  CHECK(dirichlet_ratio(0.5, 4, 0.0) == 1.0);
  CHECK(dirichlet_ratio(0.5, 1, 0.37) == doctest::Approx(1.0));
  CHECK(std::abs(dirichlet_ratio(0.5, 4, 0.5)) < 1e-15);
  // Grating point: numerator and denominator both vanish.
  CHECK(std::abs(dirichlet_ratio(0.5, 4, 2.0)) == doctest::Approx(1.0));
  CHECK(std::abs(dirichlet_ratio(0.5, 5, 2.0)) == doctest::Approx(1.0));
}

TEST_CASE("dirichlet_jet: derivatives match finite differences, including near grating points") {
  for (int m : {1, 2, 4, 7}) {
    for (double u : {-1.3, -0.2, 0.0, 0.05, 0.61, 1.999999, 2.0, 2.3}) {
      const Jet j = dirichlet_jet(0.5, m, u);
      CHECK(j.v == doctest::Approx(dirichlet_ratio(0.5, m, u)).epsilon(1e-12));
      CHECK(j.d1 == doctest::Approx(fd([&](double t) { return dirichlet_ratio(0.5, m, t); }, u)).epsilon(1e-6).scale(1.0));
      CHECK(j.d2 == doctest::Approx(fd([&](double t) { return dirichlet_jet(0.5, m, t).d1; }, u)).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("steering_vector: reference values") {
  CHECK(steering_vector(0.5, 1, 0.7)(0) == cplx{1.0, 0.0});
  const Eigen::VectorXcd b = steering_vector(0.5, 6, 0.0);
  for (int m = 0; m < 6; ++m) CHECK(std::abs(b(m) - 1.0 / std::sqrt(6.0)) < 1e-15);
  const Eigen::VectorXcd s = steering_vector(0.5, 4, kPi / 6);
  for (int m = 0; m < 4; ++m) CHECK(std::abs(s(m)) == doctest::Approx(0.5));
  CHECK(std::arg(s(0)) == doctest::Approx(0.75 * kPi).epsilon(1e-14));
}

TEST_CASE("path gains: reference magnitudes and scaling") {
  Scene s;
  s.bs.position = {0.0, 5.0};
  s.bs.elements = 1;
  s.irs = {IrsSpec{{0.0, 0.0}, kPi / 2, 0.01}};
  CHECK(std::abs(path_gain_bs_irs(s, 0)) == doctest::Approx(std::sqrt(0.01 / (4 * kPi)) / 5).epsilon(1e-13));
  CHECK(std::abs(path_gain_bs_irs(s, 0)) == doctest::Approx(5.642e-3).epsilon(1e-3));

  const double near = std::abs(path_gain_bs_irs(s, 0));
  s.bs.position = {0.0, 10.0};
  CHECK(std::abs(path_gain_bs_irs(s, 0)) == doctest::Approx(near / 2).epsilon(1e-13));

  s.radio.absorption_per_m = 0.05;
  CHECK(std::abs(path_gain_bs_irs(s, 0)) == doctest::Approx(near / 2 * std::exp(-0.5)).epsilon(1e-13));
}

TEST_CASE("path_gain_wall: reference magnitude and wavelength scaling") {
  Scene s;
  s.bs.position = {0.0, 3.0};
  s.bs.elements = 1;
  s.irs = {IrsSpec{{5.0, 0.0}, kPi / 2, 0.01}};
  UeSpec ue;
  ue.position = {8.0, 3.0};
  s.ues = {ue};
  s.wall = WallSpec{{0.0, 0.0}, {10.0, 0.0}, ConstantMaterial{cplx{1.0, 0.0}}};
  const ChannelRealization r = ChannelRealization::nominal(s);
  CHECK(std::abs(path_gain_wall(s, r, 0)) == doctest::Approx(3e-3 / (4 * kPi * 10)).epsilon(1e-12));
  CHECK(std::abs(path_gain_wall(s, r, 0)) == doctest::Approx(2.387e-5).epsilon(1e-3));
  s.radio.wavelength_m = 6e-3;
  CHECK(std::abs(path_gain_wall(s, r, 0)) == doctest::Approx(6e-3 / (4 * kPi * 10)).epsilon(1e-12));
  s.wall->material = ConstantMaterial{cplx{0.0, 0.0}};
  CHECK(path_gain_wall(s, r, 0) == cplx{0.0, 0.0});
  s.wall.reset();
  CHECK(path_gain_wall(s, r, 0) == cplx{0.0, 0.0});
}

TEST_CASE("path_gain_irs_ue: reflector coefficient and grazing departure") {
  Scene s = single_link_scene(1e-2, 4, 2, false);
  ChannelRealization r = ChannelRealization::nominal(s);
  r.reflectors[0][0] = {Point2{7.0, 6.0}};
  r.a2[0][0] = {1.0, 1.0};
  r.rho[0][0] = {cplx{1.0, 0.0}};
  const double unit = std::abs(path_gain_irs_ue(s, r, 0, 0, 1));
  r.rho[0][0] = {cplx{std::pow(10.0, -0.5), 0.0}};
  CHECK(std::abs(path_gain_irs_ue(s, r, 0, 0, 1)) == doctest::Approx(unit * 0.316227766).epsilon(1e-8));

  // LoS leg has the same form as the BS leg with M2 elements.
  const double d = (s.irs[0].center - r.ue_positions[0]).norm();
  const double phi = std::abs(los_path(pose_of(s.irs[0]), pose_of(s.ues[0])).departure);
  CHECK(std::abs(path_gain_irs_ue(s, r, 0, 0, 0)) ==
        doctest::Approx(std::sqrt(2 * 1e-2 * std::cos(phi) / (4 * kPi)) / d).epsilon(1e-12));
}

TEST_CASE("rotation_to_gradient and misalignment") {
  CHECK(rotation_to_gradient(0.4, 0.0) == 0.0);
  CHECK(rotation_to_gradient(deg2rad(36.8), deg2rad(17.2)) == doctest::Approx(0.5571).epsilon(1e-4));
  CHECK(misalignment(deg2rad(30.0), 0.0, 0.0) == doctest::Approx(0.5));
  CHECK(misalignment(0.3, 0.3, 0.0) == 0.0);
  CHECK(std::abs(misalignment(0.9, 0.9 - 2 * 0.2, 0.2)) < 1e-15);
}

TEST_CASE("asymptotic_channel: wall off gives T = 0 and H = M Psi V1^H") {
  const Scene s = single_link_scene(1e-2, 4, 1, false);
  const ChannelRealization r = ChannelRealization::nominal(s);
  ControlVector xi = ControlVector::zeros(1, 1);
  xi.psi(0) = 0.3;
  const AsymptoticChannel a = asymptotic_channel(s, r, xi);
  CHECK(a.T.norm() == 0.0);
  const Eigen::MatrixXcd H = a.M * std::polar(1.0, 0.3) * a.V1.adjoint();
  CHECK((a.H() - H).norm() < 1e-15 * H.norm());
}

TEST_CASE("asymptotic_channel: aligned single link has unit misalignment factors") {
  const Scene s = single_link_scene(1e-2, 4, 4, false);
  const LinkGeometry links = build_links(s, ChannelRealization::nominal(s));
  const ControlVector xi = hop_configure({0}, links);
  const AsymptoticChannel a = asymptotic_channel(links, xi);
  CHECK(std::abs(a.M(0, 0)) == doctest::Approx(std::abs(links.c1[0] * links.ray(0, 0, 0).gain)).epsilon(1e-12));
  const double s0 = misalignment(links.phi1[0], links.ray(0, 0, 0).phi2, xi.delta(0));
  CHECK(std::abs(s0) < 1e-12);
}

TEST_CASE("asymptotic_channel: first beam null at s = lambda / sqrt(A)") {
  const Scene s = single_link_scene(1e-2, 4, 1, false);
  const LinkGeometry links = build_links(s, ChannelRealization::nominal(s));
  const auto [d0, a0] = aligned_angles(links, 0, 0);
  const double target = std::sin(links.ray(0, 0, 0).phi2) + 3e-3 / 0.1;
  const double delta = (links.phi1[0] - std::asin(target)) / 2;
  CHECK(std::abs(misalignment(links.phi1[0], links.ray(0, 0, 0).phi2, delta) - 0.03) < 1e-14);
  CHECK(std::abs(irs_entry(links, 0, 0, delta, a0)) < 1e-12 * std::abs(irs_entry(links, 0, 0, d0, a0)));
}

TEST_CASE("channel_jets: derivatives match finite differences") {
  ExperimentConfig cfg;
  cfg.K = cfg.N = 2;
  cfg.M2 = 4;
  cfg.paths = 2;
  cfg.wall = true;
  cfg.sigma_sh_db = 2.0;
  const Scene scene = build_scene(cfg);
  auto rng = trial_rng(3, 0);
  const LinkGeometry links = build_links(scene, sample_realization(cfg, scene, rng));
  ControlVector xi = ControlVector::zeros(2, 2);
  xi.delta << 0.2, -0.1;
  xi.alpha << 0.3, -0.4;
  const ChannelJets j = channel_jets(links, xi);
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    for (int n = 0; n < 2; ++n) {
      const cplx dd = (irs_entry(links, k, n, xi.delta(n) + h, xi.alpha(k)) -
                       irs_entry(links, k, n, xi.delta(n) - h, xi.alpha(k))) / (2 * h);
      const cplx da = (irs_entry(links, k, n, xi.delta(n), xi.alpha(k) + h) -
                       irs_entry(links, k, n, xi.delta(n), xi.alpha(k) - h)) / (2 * h);
      const double scale = std::abs(j.M_d(k, n)) + std::abs(j.M_a(k, n)) + std::abs(j.M(k, n));
      CHECK(std::abs(j.M_d(k, n) - dd) < 1e-6 * scale);
      CHECK(std::abs(j.M_a(k, n) - da) < 1e-6 * scale);
    }
    const cplx ta = (wall_entry(links, k, xi.alpha(k) + h) - wall_entry(links, k, xi.alpha(k) - h)) / (2 * h);
    CHECK(std::abs(j.T_a(k) - ta) < 1e-6 * (std::abs(j.T(k)) + std::abs(ta)) + 1e-30);
  }
}

TEST_CASE("finite IRS: single meta-atom and linear-profile closed form") {
  CHECK(std::abs(irs_response_linear(0.5, 1, 0.37, 0.8) - std::polar(1.0, 0.8)) < 1e-15);
  const double phi1 = 0.5, delta = 0.15, psi = 1.1;
  for (int L : {1, 2, 5, 16, 33}) {
    const double D = 0.4;
    const auto theta = phase_profile(phi1, delta, psi, D, L);
    for (double phi2 : {-0.7, 0.0, 0.2, phi1 - 2 * delta}) {
      const cplx direct = irs_response(D, phi1, phi2, theta);
      const cplx closed = irs_response_linear(D, L, misalignment(phi1, phi2, delta), psi);
      CHECK(std::abs(direct - closed) < 1e-12);
    }
  }
}

TEST_CASE("finite IRS: explicit matrices agree with the closed form for L <= 16") {
  ExperimentConfig cfg;
  cfg.K = 2;
  cfg.N = 3;
  cfg.M1 = 6;
  cfg.M2 = 2;
  cfg.paths = 1;
  cfg.wall = true;
  const Scene scene = build_scene(cfg);
  auto rng = trial_rng(5, 1);
  const LinkGeometry links = build_links(scene, sample_realization(cfg, scene, rng));
  const ControlVector xi = hop(links, cfg.q_vector()).xi;
  for (int L = 1; L <= 16; L += 3) {
    const std::vector<int> sides(3, L);
    for (int k = 0; k < 2; ++k) {
      const Eigen::RowVectorXcd a = finite_row_closed(links, xi, k, sides);
      const Eigen::RowVectorXcd b = finite_row_explicit(links, xi, k, sides);
      CHECK((a - b).norm() <= 1e-10 * a.norm());
    }
  }
  const auto m = finite_matrices(links, 0, 0, 4, phase_profile(links.phi1[0], 0.1, 0.0, 0.3, 4));
  CHECK(m.H1.rows() == 16);
  CHECK(m.H1.cols() == 6);
  for (Eigen::Index i = 0; i < m.theta_bar.size(); ++i) CHECK(std::abs(m.theta_bar(i)) == doctest::Approx(1.0));
}

TEST_CASE("finite IRS: rows approach the asymptotic channel as L doubles") {
  ExperimentConfig cfg;
  cfg.K = cfg.N = 2;
  cfg.M1 = 8;
  cfg.M2 = 4;
  const Scene scene = build_scene(cfg);
  const LinkGeometry links = build_links(scene, ChannelRealization::nominal(scene));
  const ControlVector xi = hop(links, cfg.q_vector()).xi;
  const Eigen::MatrixXcd H = asymptotic_channel(links, xi).H();
  double prev = 1e300, err = 0.0;
  for (int L = 34; meta_atom_spacing(1e-2, L, 3e-3) > 0.1 / 4; L *= 2) {
    Eigen::MatrixXcd F(2, 8);
    for (int k = 0; k < 2; ++k) F.row(k) = finite_row_closed(links, xi, k, {L, L});
    err = (F - H).norm() / H.norm();
    CHECK(err < prev);
    prev = err;
  }
  CHECK(err < 1e-2);
}

TEST_CASE("phase quantization") {
  CHECK(quantize_phase(kPi / 3, 2) == doctest::Approx(kPi / 2));
  CHECK(quantize_phase(-0.1, 3) == doctest::Approx(0.0));
  CHECK(quantize_phase(2 * kPi - 0.01, 1) == doctest::Approx(0.0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const double q = quantize_phase(u(rng), 1);
    CHECK((std::abs(q) < 1e-15 || std::abs(q - kPi) < 1e-15));
  }
  for (int b : {1, 2, 3, 5}) {
    for (int i = 0; i < 200; ++i) {
      const double t = u(rng);
      const double q = quantize_phase(t, b);
      const double err = std::abs(std::remainder(t - q, 2 * kPi));
      CHECK(err <= kPi / (1 << b) + 1e-12);
    }
  }
}

TEST_CASE("meta-atom count from pitch") {
  CHECK(meta_atom_spacing(1e-2, 10, 3e-3) == doctest::Approx(0.1 / 10 / 3e-3));
  const int L = meta_atoms_per_side(1e-2, 0.25, 3e-3);
  CHECK(meta_atom_spacing(1e-2, L, 3e-3) <= 0.25);
  CHECK(meta_atom_spacing(1e-2, L - 1, 3e-3) > 0.25);
}

TEST_CASE("IRS pattern: peak at phi1 - 2 delta and about 1.7 degree first-null width") {
  const Scene s = single_link_scene(1e-2, 4, 1, false);
  const LinkGeometry links = build_links(s, ChannelRealization::nominal(s));
  const double delta = deg2rad(10.0);
  const auto grid = angle_grid(-kPi / 2 + 1e-6, kPi / 2 - 1e-6, 180001);
  const auto pat = irs_radiation_pattern(s, 0, delta, grid);
  const auto peak = std::max_element(pat.begin(), pat.end(),
                                     [](const PatternSample& a, const PatternSample& b) { return a.gain < b.gain; });
  const double pointing = links.phi1[0] - 2 * delta;
  CHECK(std::abs(peak->angle - pointing) < deg2rad(0.01));
  CHECK(peak->gain == doctest::Approx(1.0));
  auto it = peak;
  while (std::next(it) != pat.end() && std::next(it)->gain < it->gain) ++it;
  const double width = rad2deg(it->angle - peak->angle);
  CHECK(width == doctest::Approx(1.7).epsilon(0.1));

  std::ostringstream os;
  write_pattern_csv(os, {pat.front()});
  CHECK(os.str().rfind("angle_deg,gain_db\n", 0) == 0);
}
