// SPDX-License-Identifier: Apache-2.0
#include "irs/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace irs {
namespace {

using nlohmann::json;

// Typed access to one JSON object that remembers its key path and rejects
// keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) fail(key(k), "unknown key");
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k) && !j_.at(k).is_null();
  }
  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  void number(const std::string& k, double& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_number()) fail(key(k), "must be a number");
    out = v.get<double>();
  }
  void integer(const std::string& k, int& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_number_integer()) fail(key(k), "must be an integer");
    out = v.get<int>();
  }
  void unsigned64(const std::string& k, std::uint64_t& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_number_unsigned()) fail(key(k), "must be a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void boolean(const std::string& k, bool& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_boolean()) fail(key(k), "must be true or false");
    out = v.get<bool>();
  }
  void string(const std::string& k, std::string& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_string()) fail(key(k), "must be a string");
    out = v.get<std::string>();
  }
  void complex(const std::string& k, cplx& out) {
    if (!has(k)) return;
    out = to_complex(j_.at(k), key(k));
  }
  void point(const std::string& k, Point2& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(key(k), "must be [x, y] in meters");
    out = {v[0].get<double>(), v[1].get<double>()};
  }
  void numbers(const std::string& k, std::vector<double>& out) {
    if (!has(k)) return;
    const json& v = j_.at(k);
    if (!v.is_array()) fail(key(k), "must be an array of numbers");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key(k) + "[" + std::to_string(i) + "]", "must be a number");
      out.push_back(v[i].get<double>());
    }
  }
  const json& raw(const std::string& k) { seen_.insert(k); return j_.at(k); }

  static cplx to_complex(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    fail(where, "must be a number or [re, im]");
    return {};
  }
  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw ConfigError("config: " + where + ": " + what);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_radio(Section s, RadioParams& r) {
  if (s.has("frequency_ghz") && s.has("wavelength_mm"))
    Section::fail(s.key("frequency_ghz"), "give either frequency_ghz or wavelength_mm, not both");
  double f_ghz = 299792458.0 / r.wavelength_m / 1e9;
  double lambda_mm = r.wavelength_m * 1e3;
  if (s.has("frequency_ghz")) {
    s.number("frequency_ghz", f_ghz);
    if (!(f_ghz > 0)) Section::fail(s.key("frequency_ghz"), "must be > 0");
    r.wavelength_m = 299792458.0 / (f_ghz * 1e9);
  }
  s.number("wavelength_mm", lambda_mm);
  if (s.has("wavelength_mm")) r.wavelength_m = lambda_mm * 1e-3;
  double b_mhz = r.bandwidth_hz / 1e6;
  s.number("bandwidth_mhz", b_mhz);
  r.bandwidth_hz = b_mhz * 1e6;
  s.number("noise_density_dbm_hz", r.noise_density_dbm_hz);
  s.number("absorption_per_m", r.absorption_per_m);
  s.number("transmit_power_w", r.transmit_power_w);
  s.complex("irs_reflection", r.irs_reflection);
}

WallMaterial read_material(Section s) {
  std::string type = "table";
  s.string("type", type);
  if (type == "constant") {
    ConstantMaterial m{{-0.5, 0.0}};
    s.complex("rho", m.rho);
    return m;
  }
  if (type == "permittivity") {
    PermittivityMaterial m{{4.0, 0.0}};
    s.complex("relative_permittivity", m.relative_permittivity);
    return m;
  }
  if (type != "table") Section::fail(s.key("type"), "must be 'table', 'constant' or 'permittivity'");
  if (!s.has("table")) return WallSpec::plasterboard_table();
  const json& t = s.raw("table");
  if (!t.is_array() || t.empty()) Section::fail(s.key("table"), "must be a non-empty array");
  AngleTableMaterial m;
  for (std::size_t i = 0; i < t.size(); ++i) {
    Section row(t[i], s.key("table") + "[" + std::to_string(i) + "]");
    double deg = 0.0;
    cplx rho{};
    if (!row.has("incidence_deg") || !row.has("rho")) Section::fail(row.key("incidence_deg"), "rows need incidence_deg and rho");
    row.number("incidence_deg", deg);
    row.complex("rho", rho);
    m.angles.push_back(deg2rad(deg));
    m.rho.push_back(rho);
  }
  return m;
}

void apply_root(const json& root, RunConfig& rc) {
  ExperimentConfig& c = rc.experiment;
  Section top(root, "");
  if (top.has("radio")) read_radio(Section(top.raw("radio"), "radio"), c.radio);
  if (top.has("bs")) {
    Section s(top.raw("bs"), "bs");
    double x = c.bs_position.x, y = c.bs_position.y, bore = rad2deg(c.bs_boresight);
    s.number("x_m", x);
    s.number("y_m", y);
    s.number("boresight_deg", bore);
    s.integer("elements", c.M1);
    s.number("spacing_wavelengths", c.bs_spacing);
    c.bs_position = {x, y};
    c.bs_boresight = deg2rad(bore);
  }
  if (top.has("irs")) {
    Section s(top.raw("irs"), "irs");
    double area_cm2 = c.irs_area_m2 * 1e4, normal = rad2deg(c.irs_normal);
    s.integer("count", c.N);
    s.number("area_cm2", area_cm2);
    s.number("normal_deg", normal);
    s.number("room_width_m", c.room_width_m);
    c.irs_area_m2 = area_cm2 * 1e-4;
    c.irs_normal = deg2rad(normal);
    if (s.has("panels")) {
      const json& p = s.raw("panels");
      if (!p.is_array()) Section::fail(s.key("panels"), "must be an array");
      c.irs.clear();
      for (std::size_t i = 0; i < p.size(); ++i) {
        Section e(p[i], s.key("panels") + "[" + std::to_string(i) + "]");
        IrsSpec spec{{0.0, 0.0}, c.irs_normal, c.irs_area_m2};
        double nd = rad2deg(spec.normal), a = spec.area_m2 * 1e4;
        if (!e.has("center_m") || !e.has("normal_deg"))
          Section::fail(e.key("center_m"), "panels need center_m and normal_deg");
        e.point("center_m", spec.center);
        e.number("normal_deg", nd);
        e.number("area_cm2", a);
        spec.normal = deg2rad(nd);
        spec.area_m2 = a * 1e-4;
        c.irs.push_back(spec);
      }
      c.N = static_cast<int>(c.irs.size());
    }
  }
  if (top.has("ue")) {
    Section s(top.raw("ue"), "ue");
    double bore = rad2deg(c.ue_boresight);
    s.integer("count", c.K);
    s.integer("elements", c.M2);
    s.number("spacing_wavelengths", c.ue_spacing);
    s.number("boresight_deg", bore);
    c.ue_boresight = deg2rad(bore);
    if (s.has("region_m")) {
      Section r(s.raw("region_m"), s.key("region_m"));
      r.number("x_min", c.ue_region.x_min);
      r.number("x_max", c.ue_region.x_max);
      r.number("y_min", c.ue_region.y_min);
      r.number("y_max", c.ue_region.y_max);
    }
  }
  if (top.has("wall")) {
    Section s(top.raw("wall"), "wall");
    s.boolean("enabled", c.wall);
    s.point("from_m", c.wall_spec.a);
    s.point("to_m", c.wall_spec.b);
    if (s.has("material")) c.wall_spec.material = read_material(Section(s.raw("material"), s.key("material")));
  }
  if (top.has("channel")) {
    Section s(top.raw("channel"), "channel");
    std::string domain = c.shadowing_domain == ShadowingDomain::Amplitude ? "amplitude" : "power";
    s.integer("paths", c.paths);
    s.number("sigma_sh_db", c.sigma_sh_db);
    s.string("shadowing_domain", domain);
    s.boolean("shadow_bs_links", c.shadow_bs_links);
    s.number("reflector_gain_db", c.reflector_gain_db);
    s.boolean("shared_reflectors", c.shared_reflectors);
    if (domain == "amplitude") c.shadowing_domain = ShadowingDomain::Amplitude;
    else if (domain == "power") c.shadowing_domain = ShadowingDomain::Power;
    else Section::fail(s.key("shadowing_domain"), "must be 'amplitude' or 'power'");
  }
  if (top.has("evaluation")) {
    Section s(top.raw("evaluation"), "evaluation");
    std::string csi = to_string(c.csi);
    s.string("csi", csi);
    if (csi == "full") c.csi = CsiMode::Full;
    else if (csi == "los-only") c.csi = CsiMode::LosOnly;
    else Section::fail(s.key("csi"), "must be 'full' or 'los-only'");
    s.boolean("finite", c.finite_evaluation);
    if (s.has("quant_bits")) {
      int b = 0;
      s.integer("quant_bits", b);
      c.quant_bits = b;
    }
    s.number("meta_atom_spacing_wavelengths", c.meta_atom_spacing);
    s.numbers("q", c.q);
  }
  if (top.has("optimizer")) {
    Section s(top.raw("optimizer"), "optimizer");
    if (s.has("algorithms")) {
      const json& a = s.raw("algorithms");
      if (!a.is_array() || a.empty()) Section::fail(s.key("algorithms"), "must be a non-empty array");
      c.algorithms.clear();
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string where = s.key("algorithms") + "[" + std::to_string(i) + "]";
        if (!a[i].is_string()) Section::fail(where, "must be a string");
        try {
          c.algorithms.push_back(parse_algorithm(a[i].get<std::string>()));
        } catch (const std::invalid_argument& e) {
          Section::fail(where, e.what());
        }
      }
    }
    s.integer("starts", c.starts);
    s.integer("max_iterations", c.newton.max_iterations);
    s.number("step_tolerance_rad", c.newton.step_tolerance);
    s.boolean("pure_newton", c.newton.pure);
  }
  if (top.has("experiment")) {
    Section s(top.raw("experiment"), "experiment");
    s.integer("trials", c.trials);
    s.unsigned64("seed", c.seed);
  }
  if (top.has("sweep")) {
    Section s(top.raw("sweep"), "sweep");
    SweepSpec sw;
    s.string("variable", sw.variable);
    s.numbers("values", sw.values);
    s.boolean("tie_n_to_k", sw.tie_n_to_k);
    rc.sweep = sw;
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const ConfigOverrides& o) {
  RunConfig rc;
  json root = json::object();
  if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config: syntax error: ") + e.what());
    }
  }
  apply_root(root, rc);
  ExperimentConfig& c = rc.experiment;
  if (o.K) c.K = *o.K;
  if (o.N) {
    c.N = *o.N;
    c.irs.clear();
  }
  if (o.M1) c.M1 = *o.M1;
  if (o.M2) c.M2 = *o.M2;
  if (o.area_cm2) c.irs_area_m2 = *o.area_cm2 * 1e-4;
  if (o.trials) c.trials = *o.trials;
  if (o.seed) c.seed = *o.seed;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return rc;
}

RunConfig parse_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides);
}

std::string dump_config(const RunConfig& rc) {
  const ExperimentConfig& c = rc.experiment;
  auto cj = [](cplx z) { return json::array({z.real(), z.imag()}); };
  json j;
  j["radio"] = {{"wavelength_mm", c.radio.wavelength_m * 1e3},
                {"bandwidth_mhz", c.radio.bandwidth_hz / 1e6},
                {"noise_density_dbm_hz", c.radio.noise_density_dbm_hz},
                {"absorption_per_m", c.radio.absorption_per_m},
                {"transmit_power_w", c.radio.transmit_power_w},
                {"irs_reflection", cj(c.radio.irs_reflection)}};
  j["bs"] = {{"x_m", c.bs_position.x}, {"y_m", c.bs_position.y},
             {"boresight_deg", rad2deg(c.bs_boresight)}, {"elements", c.M1},
             {"spacing_wavelengths", c.bs_spacing}};
  j["irs"] = {{"count", c.N}, {"area_cm2", c.irs_area_m2 * 1e4},
              {"normal_deg", rad2deg(c.irs_normal)}, {"room_width_m", c.room_width_m}};
  if (!c.irs.empty()) {
    json panels = json::array();
    for (const auto& p : c.irs)
      panels.push_back({{"center_m", {p.center.x, p.center.y}},
                        {"normal_deg", rad2deg(p.normal)},
                        {"area_cm2", p.area_m2 * 1e4}});
    j["irs"]["panels"] = panels;
  }
  j["ue"] = {{"count", c.K}, {"elements", c.M2}, {"spacing_wavelengths", c.ue_spacing},
             {"boresight_deg", rad2deg(c.ue_boresight)},
             {"region_m", {{"x_min", c.ue_region.x_min}, {"x_max", c.ue_region.x_max},
                           {"y_min", c.ue_region.y_min}, {"y_max", c.ue_region.y_max}}}};
  json mat;
  if (const auto* m = std::get_if<ConstantMaterial>(&c.wall_spec.material)) {
    mat = {{"type", "constant"}, {"rho", cj(m->rho)}};
  } else if (const auto* m = std::get_if<PermittivityMaterial>(&c.wall_spec.material)) {
    mat = {{"type", "permittivity"}, {"relative_permittivity", cj(m->relative_permittivity)}};
  } else {
    const auto& t = std::get<AngleTableMaterial>(c.wall_spec.material);
    json rows = json::array();
    for (std::size_t i = 0; i < t.angles.size(); ++i)
      rows.push_back({{"incidence_deg", rad2deg(t.angles[i])}, {"rho", cj(t.rho[i])}});
    mat = {{"type", "table"}, {"table", rows}};
  }
  j["wall"] = {{"enabled", c.wall}, {"from_m", {c.wall_spec.a.x, c.wall_spec.a.y}},
               {"to_m", {c.wall_spec.b.x, c.wall_spec.b.y}}, {"material", mat}};
  j["channel"] = {{"paths", c.paths}, {"sigma_sh_db", c.sigma_sh_db},
                  {"shadowing_domain", c.shadowing_domain == ShadowingDomain::Amplitude ? "amplitude" : "power"},
                  {"shadow_bs_links", c.shadow_bs_links}, {"reflector_gain_db", c.reflector_gain_db},
                  {"shared_reflectors", c.shared_reflectors}};
  j["evaluation"] = {{"csi", to_string(c.csi)}, {"finite", c.finite_evaluation},
                     {"meta_atom_spacing_wavelengths", c.meta_atom_spacing}, {"q", c.q}};
  if (c.quant_bits) j["evaluation"]["quant_bits"] = *c.quant_bits;
  json algs = json::array();
  for (Algorithm a : c.algorithms) algs.push_back(to_string(a));
  j["optimizer"] = {{"algorithms", algs}, {"starts", c.starts},
                    {"max_iterations", c.newton.max_iterations},
                    {"step_tolerance_rad", c.newton.step_tolerance}, {"pure_newton", c.newton.pure}};
  j["experiment"] = {{"trials", c.trials}, {"seed", c.seed}};
  if (rc.sweep)
    j["sweep"] = {{"variable", rc.sweep->variable}, {"values", rc.sweep->values},
                  {"tie_n_to_k", rc.sweep->tie_n_to_k}};
  return j.dump(2);
}

}  // namespace irs
