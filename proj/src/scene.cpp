// SPDX-License-Identifier: Apache-2.0
#include "irs/scene.hpp"

#include <algorithm>
#include <sstream>

#include "irs/log.hpp"

namespace irs {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

Point2 checked_leg(Point2 from, Point2 to, const char* what) {
  const Point2 d = to - from;
  if (!(d.norm() > 0.0)) throw GeometryError(std::string("degenerate geometry: ") + what);
  return d;
}

}  // namespace

void RadioParams::validate() const {
  require(std::isfinite(wavelength_m) && wavelength_m > 0, "radio.wavelength must be > 0");
  require(std::isfinite(bandwidth_hz) && bandwidth_hz > 0, "radio.bandwidth must be > 0");
  require(std::isfinite(absorption_per_m) && absorption_per_m >= 0, "radio.absorption must be >= 0");
  require(std::isfinite(transmit_power_w) && transmit_power_w > 0, "radio.transmit_power must be > 0");
  require(std::isfinite(noise_density_dbm_hz), "radio.noise_density must be finite");
  require(noise_power_w() > 0, "radio noise power must be > 0");
  require(std::isfinite(std::abs(irs_reflection)) && std::abs(irs_reflection) <= 1.0,
          "radio.irs_reflection must satisfy |rho| <= 1");
}

IrsSpec IrsSpec::from_grid(Point2 center, double normal, int side, double spacing,
                           double wavelength_m) {
  require(side >= 1, "IRS grid side must be >= 1");
  require(spacing > 0 && wavelength_m > 0, "IRS spacing and wavelength must be > 0");
  const double edge = side * spacing * wavelength_m;
  return IrsSpec{center, normal, edge * edge};
}

AngleTableMaterial WallSpec::plasterboard_table() {
  static const double amplitude[] = {0.12, 0.12, 0.125, 0.13, 0.14, 0.17, 0.24, 0.38, 0.62, 1.0};
  AngleTableMaterial t;
  for (int i = 0; i < 10; ++i) {
    t.angles.push_back(deg2rad(10.0 * i));
    t.rho.push_back(cplx{-amplitude[i], 0.0});
  }
  return t;
}

void WallSpec::validate() const {
  require(a.finite() && b.finite(), "wall endpoints must be finite");
  require((b - a).norm() > 0, "wall endpoints must be distinct");
  if (const auto* t = std::get_if<AngleTableMaterial>(&material)) {
    require(!t->angles.empty() && t->angles.size() == t->rho.size(),
            "wall table needs matching, non-empty angle and rho lists");
    for (std::size_t i = 0; i < t->angles.size(); ++i) {
      require(t->angles[i] >= 0 && t->angles[i] <= kPi / 2, "wall table angles must lie in [0, 90] deg");
      require(i == 0 || t->angles[i] > t->angles[i - 1], "wall table angles must be strictly increasing");
      require(std::abs(t->rho[i]) <= 1.0 + 1e-12, "wall table |rho| must be <= 1");
    }
  } else if (const auto* c = std::get_if<ConstantMaterial>(&material)) {
    require(std::abs(c->rho) <= 1.0 + 1e-12, "wall constant |rho| must be <= 1");
  }
}

void Scene::validate() const {
  radio.validate();
  require(bs.position.finite(), "bs.position must be finite");
  require(bs.elements >= 1, "bs.elements (M1) must be >= 1");
  require(bs.spacing > 0, "bs.spacing must be > 0");
  require(!irs.empty(), "at least one IRS is required");
  require(!ues.empty(), "at least one UE is required");
  for (const auto& s : irs) {
    require(s.center.finite(), "irs.center must be finite");
    require(std::isfinite(s.area_m2) && s.area_m2 > 0, "irs.area must be > 0");
  }
  for (const auto& u : ues) {
    require(u.elements >= 1, "ue.elements (M2) must be >= 1");
    require(u.spacing > 0, "ue.spacing must be > 0");
  }
  if (wall) wall->validate();
  require(ue_region.valid(), "ue_region must have positive extent");
  if (std::min(bs.elements, num_irs()) < num_ues()) {
    std::ostringstream os;
    os << "zero-forcing needs min(M1, N) >= K (M1=" << bs.elements << ", N=" << num_irs()
       << ", K=" << num_ues() << ")";
    throw std::invalid_argument(os.str());
  }
}

Scene make_reference_scene(const ReferenceLayout& layout) {
  require(layout.irs_count >= 1 && layout.ue_count >= 1, "layout needs N >= 1 and K >= 1");
  Scene s;
  s.bs.position = {0.0, 5.0};
  s.bs.boresight = 0.0;
  s.bs.elements = layout.bs_elements;
  const double w = layout.room_width_m;
  for (int n = 0; n < layout.irs_count; ++n) {
    s.irs.push_back(IrsSpec{{(n + 0.5) * w / layout.irs_count, 0.0}, kPi / 2, layout.irs_area_m2});
  }
  s.ue_region = Rect{0.25 * w, w, 0.4 * w, w};
  for (int k = 0; k < layout.ue_count; ++k) {
    const double t = (k + 0.5) / layout.ue_count;
    UeSpec u;
    u.position = {s.ue_region.x_min + t * (s.ue_region.x_max - s.ue_region.x_min),
                  0.5 * (s.ue_region.y_min + s.ue_region.y_max)};
    u.elements = layout.ue_elements;
    s.ues.push_back(u);
  }
  if (layout.wall) s.wall = WallSpec{{0.0, 0.0}, {w, 0.0}, WallSpec::plasterboard_table()};
  return s;
}

double signed_angle(double boresight, Point2 direction) {
  const Point2 b = unit_vector(boresight);
  return std::atan2(cross(b, direction), dot(b, direction));
}

PathAngles los_path(const Pose& source, const Pose& destination) {
  const Point2 d = checked_leg(source.position, destination.position, "coincident endpoints");
  PathAngles p;
  p.departure = signed_angle(source.boresight, d);
  p.arrival = signed_angle(destination.boresight, -1.0 * d);
  p.length = d.norm();
  p.illuminated = !(source.one_sided && std::abs(p.departure) >= kPi / 2) &&
                  !(destination.one_sided && std::abs(p.arrival) >= kPi / 2);
  return p;
}

std::optional<WallPath> wall_image_path(const BsSpec& bs, const UeSpec& ue, const WallSpec& wall) {
  const Point2 t = checked_leg(wall.a, wall.b, "wall endpoints coincide");
  const Point2 u = (1.0 / t.norm()) * t;
  const double side_bs = cross(u, bs.position - wall.a);
  const double side_ue = cross(u, ue.position - wall.a);
  if (side_bs * side_ue <= 0.0) return std::nullopt;

  // Image of the BS mirrored through the wall line.
  const Point2 nrm{-u.y, u.x};
  const Point2 image = bs.position - (2.0 * side_bs) * nrm;
  const double h_bs = std::abs(side_bs);
  const double h_ue = std::abs(side_ue);
  const double along_bs = dot(u, bs.position - wall.a);
  const double along_ue = dot(u, ue.position - wall.a);
  const double along = along_bs + (along_ue - along_bs) * h_bs / (h_bs + h_ue);
  if (along < 0.0 || along > t.norm()) return std::nullopt;

  WallPath w;
  w.reflection_point = wall.a + along * u;
  const Point2 to_refl = checked_leg(bs.position, w.reflection_point, "BS on wall");
  const Point2 ue_to_refl = checked_leg(ue.position, w.reflection_point, "UE on wall");
  w.path.departure = signed_angle(bs.boresight, to_refl);
  w.path.arrival = signed_angle(ue.boresight, ue_to_refl);
  w.path.length = (ue.position - image).norm();
  w.path.illuminated = true;
  w.incidence = std::atan2(std::abs(along - along_bs), h_bs);
  return w;
}

PathAngles reflector_path(const IrsSpec& irs, Point2 reflector, const UeSpec& ue) {
  const Point2 leg1 = checked_leg(irs.center, reflector, "reflector on IRS");
  const Point2 leg2 = checked_leg(reflector, ue.position, "reflector on UE");
  PathAngles p;
  p.departure = signed_angle(irs.normal, leg1);
  p.arrival = signed_angle(ue.boresight, -1.0 * leg2);
  p.length = leg1.norm() + leg2.norm();
  p.illuminated = std::abs(p.departure) < kPi / 2;
  return p;
}

cplx wall_reflection_coefficient(const WallSpec& wall, double incidence) {
  if (!std::isfinite(incidence)) throw std::invalid_argument("wall incidence must be finite");
  struct Visitor {
    double theta;
    cplx operator()(const ConstantMaterial& m) const { return m.rho; }
    cplx operator()(const PermittivityMaterial& m) const {
      // TE (perpendicular) Fresnel coefficient from air onto a half-space.
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      const cplx root = std::sqrt(m.relative_permittivity - s * s);
      const cplx den = c + root;
      if (std::abs(den) == 0.0) return cplx{-1.0, 0.0};
      return (c - root) / den;
    }
    cplx operator()(const AngleTableMaterial& m) const {
      const auto& a = m.angles;
      if (theta < a.front() || theta > a.back()) {
        warn("wall incidence " + std::to_string(rad2deg(theta)) +
             " deg outside the material table; clamped");
      }
      if (theta <= a.front()) return m.rho.front();
      if (theta >= a.back()) return m.rho.back();
      const auto hi = std::upper_bound(a.begin(), a.end(), theta);
      const std::size_t j = static_cast<std::size_t>(hi - a.begin());
      const double w = (theta - a[j - 1]) / (a[j] - a[j - 1]);
      return (1.0 - w) * m.rho[j - 1] + w * m.rho[j];
    }
  };
  return std::visit(Visitor{incidence}, wall.material);
}

}  // namespace irs
