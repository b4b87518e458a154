// SPDX-License-Identifier: Apache-2.0
//
// 2D scene description: base station, IRS panels, user equipments, the
// reflecting wall, and the ray geometry (angles, path lengths) between them.
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace irs {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;

  double norm() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline Point2 unit_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Thrown when two points that must be distinct coincide, or a path leg has
/// zero length.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RadioParams {
  double wavelength_m = 3e-3;             // f0 = 100 GHz
  double bandwidth_hz = 100e6;
  double noise_density_dbm_hz = -174.0;
  double absorption_per_m = 0.0;          // molecular absorption kappa
  double transmit_power_w = 1.0;
  cplx irs_reflection{1.0, 0.0};

  /// sigma^2 = N0 * B in watts.
  double noise_power_w() const {
    return std::pow(10.0, (noise_density_dbm_hz - 30.0) / 10.0) * bandwidth_hz;
  }
  void validate() const;
};

/// Base-station ULA. `boresight` is the direction of the array normal.
struct BsSpec {
  Point2 position{0.0, 5.0};
  double boresight = 0.0;
  int elements = 4;
  double spacing = 0.5;  // wavelengths
};

/// One square IRS panel; `normal` is the outward normal of the reflecting face.
struct IrsSpec {
  Point2 center;
  double normal = kPi / 2;
  double area_m2 = 1e-2;

  /// Panel of L x L meta-atoms of side `spacing` wavelengths: A = L^2 spacing^2 lambda^2.
  static IrsSpec from_grid(Point2 center, double normal, int side, double spacing,
                           double wavelength_m);
};

struct UeSpec {
  Point2 position;
  double boresight = -kPi / 2;
  int elements = 1;
  double spacing = 0.5;  // wavelengths
};

struct ConstantMaterial {
  cplx rho;
};
struct PermittivityMaterial {
  cplx relative_permittivity;
};
struct AngleTableMaterial {
  std::vector<double> angles;  // incidence, radians, strictly increasing in [0, pi/2]
  std::vector<cplx> rho;
};
using WallMaterial = std::variant<ConstantMaterial, PermittivityMaterial, AngleTableMaterial>;

struct WallSpec {
  Point2 a;
  Point2 b;
  WallMaterial material = ConstantMaterial{cplx{-0.5, 0.0}};

  /// Default plasterboard table: low reflectivity (|rho| ~ 0.12-0.17) up to
  /// 50 degrees, rising to total reflection at grazing incidence.
  static AngleTableMaterial plasterboard_table();
  void validate() const;
};

/// Axis-aligned rectangle used for random UE and reflector placement.
struct Rect {
  double x_min = 2.5;
  double x_max = 10.0;
  double y_min = 4.0;
  double y_max = 10.0;
  bool valid() const { return x_max > x_min && y_max > y_min; }
};

/// Departure angle is measured from the source boresight, arrival angle from
/// the destination boresight; both counter-clockwise positive.
struct PathAngles {
  double departure = 0.0;
  double arrival = 0.0;
  double length = 0.0;
  bool illuminated = true;
};

/// Position plus facing direction. One-sided poses (IRS panels) only
/// radiate and collect on the front half-plane.
struct Pose {
  Point2 position;
  double boresight = 0.0;
  bool one_sided = false;
};

inline Pose pose_of(const BsSpec& bs) { return {bs.position, bs.boresight, false}; }
inline Pose pose_of(const IrsSpec& irs) { return {irs.center, irs.normal, true}; }
inline Pose pose_of(const UeSpec& ue) { return {ue.position, ue.boresight, false}; }

struct Scene {
  RadioParams radio;
  BsSpec bs;
  std::vector<IrsSpec> irs;
  std::vector<UeSpec> ues;
  std::optional<WallSpec> wall;
  Rect ue_region;

  int num_irs() const { return static_cast<int>(irs.size()); }
  int num_ues() const { return static_cast<int>(ues.size()); }

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;
};

/// Room of the reference deployment: 10 m x 10 m, BS at (0,5) facing +x,
/// N IRSs equally spaced on the x axis facing +y, UEs in [2.5,10]x[4,10]
/// facing the IRS wall. The wall (x axis) uses the plasterboard table.
struct ReferenceLayout {
  int irs_count = 1;
  int ue_count = 1;
  int bs_elements = 4;
  int ue_elements = 1;
  double irs_area_m2 = 1e-2;
  bool wall = false;
  double room_width_m = 10.0;
};
Scene make_reference_scene(const ReferenceLayout& layout);

/// Signed angle from `boresight` to `direction`, in (-pi, pi].
double signed_angle(double boresight, Point2 direction);

PathAngles los_path(const Pose& source, const Pose& destination);

struct WallPath {
  PathAngles path;         // departure at BS, arrival at UE, unfolded length
  double incidence = 0.0;  // angle from the wall normal at the reflection point
  Point2 reflection_point;
};

/// Image-theorem reflection of the BS signal off the wall segment towards the
/// UE. Returns nullopt when the specular point falls outside the segment or
/// BS and UE are on opposite sides.
std::optional<WallPath> wall_image_path(const BsSpec& bs, const UeSpec& ue, const WallSpec& wall);

/// IRS -> point reflector -> UE. The departure angle is taken at the IRS,
/// the arrival angle at the UE, and the length is the sum of both legs.
PathAngles reflector_path(const IrsSpec& irs, Point2 reflector, const UeSpec& ue);

/// Complex reflection coefficient of the wall material at the given
/// incidence angle (radians from the wall normal).
cplx wall_reflection_coefficient(const WallSpec& wall, double incidence);

}  // namespace irs
