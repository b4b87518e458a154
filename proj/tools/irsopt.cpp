// SPDX-License-Identifier: Apache-2.0
//
// irsopt: command-line front end. Every invocation prints one JSON summary on
// stdout; exit status is 0 iff the requested work succeeded.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "irs/config.hpp"
#include "irs/finite.hpp"
#include "irs/harness.hpp"
#include "irs/log.hpp"
#include "irs/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int thread_count() {
  if (const char* env = std::getenv("IRSOPT_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) return t;
  }
  return 1;
}

struct Common {
  std::string config;
  std::string out_dir = ".";
  irs::ConfigOverrides o;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "JSON configuration file (defaults if omitted)");
  app->add_option("--out-dir", c.out_dir, "Directory for CSV outputs");
  app->add_option("--K", c.o.K, "Number of UEs");
  app->add_option("--N", c.o.N, "Number of IRSs");
  app->add_option("--M1", c.o.M1, "BS antennas");
  app->add_option("--M2", c.o.M2, "UE antennas");
  app->add_option("--area-cm2", c.o.area_cm2, "IRS area in cm^2");
  app->add_option("--trials", c.o.trials, "Monte Carlo trials");
  app->add_option("--seed", c.o.seed, "Top-level random seed");
}

irs::RunConfig load(const Common& c) {
  return c.config.empty() ? irs::parse_config_text("", c.o) : irs::parse_config(c.config, c.o);
}

fs::path out_file(const Common& c, const std::string& name) {
  fs::create_directories(c.out_dir);
  return fs::path(c.out_dir) / name;
}

json summary_json(const irs::Summary& s) {
  return {{"algorithm", irs::to_string(s.algorithm)}, {"trials", s.trials},
          {"failures", s.failures}, {"mean_snr_db", s.mean_snr_db},
          {"mean_snr_linear_db", s.mean_snr_linear_db}, {"median_snr_db", s.median_snr_db},
          {"p10_snr_db", s.p10_snr_db}, {"p90_snr_db", s.p90_snr_db},
          {"mean_rate", s.mean_rate}, {"throughput_gbps", s.throughput_gbps}};
}

json control_json(const irs::ControlVector& xi) {
  auto deg = [](const Eigen::VectorXd& v) {
    std::vector<double> out;
    for (double x : v) out.push_back(irs::rad2deg(x));
    return out;
  };
  return {{"delta_deg", deg(xi.delta)}, {"psi_deg", deg(xi.psi)}, {"alpha_deg", deg(xi.alpha)}};
}

json cmd_simulate(const Common& c) {
  const irs::RunConfig rc = load(c);
  const auto& cfg = rc.experiment;
  const auto records = irs::run_experiment(cfg, thread_count());
  std::ofstream rec(out_file(c, "records.csv"));
  irs::write_records_csv(rec, records);
  std::ofstream cdf(out_file(c, "cdf.csv"));
  irs::write_cdf_csv(cdf, records, cfg.algorithms);
  json algs = json::array();
  for (auto a : cfg.algorithms) algs.push_back(summary_json(irs::summarize(records, a, cfg.K, cfg.radio.bandwidth_hz)));
  return {{"command", "simulate"}, {"summaries", algs},
          {"outputs", {(fs::path(c.out_dir) / "records.csv").string(), (fs::path(c.out_dir) / "cdf.csv").string()}}};
}

json cmd_sweep(const Common& c, std::string variable, std::vector<double> values, bool untie) {
  const irs::RunConfig rc = load(c);
  irs::SweepSpec sw = rc.sweep.value_or(irs::SweepSpec{});
  if (!variable.empty()) sw.variable = variable;
  if (!values.empty()) sw.values = values;
  if (untie) sw.tie_n_to_k = false;
  if (sw.values.empty()) throw irs::ConfigError("sweep: no values given (config sweep.values or --values)");
  const auto points = irs::run_sweep(rc.experiment, sw.variable, sw.values, sw.tie_n_to_k, thread_count());
  std::ofstream os(out_file(c, "sweep.csv"));
  irs::write_sweep_csv(os, sw.variable, points);
  json pts = json::array();
  for (const auto& p : points) {
    json s = json::array();
    for (const auto& x : p.summaries) s.push_back(summary_json(x));
    pts.push_back({{"x", p.x}, {"summaries", s}});
  }
  return {{"command", "sweep"}, {"variable", sw.variable}, {"points", pts},
          {"outputs", {(fs::path(c.out_dir) / "sweep.csv").string()}}};
}

json cmd_pattern(const Common& c, int trial, std::optional<double> delta_deg, int points) {
  const irs::RunConfig rc = load(c);
  const auto& cfg = rc.experiment;
  const irs::Scene scene = irs::build_scene(cfg);
  auto rng = irs::trial_rng(cfg.seed, trial);
  const irs::ChannelRealization real = irs::sample_realization(cfg, scene, rng);
  const irs::LinkGeometry links = irs::build_links(scene, real);
  const irs::ControlVector xi = irs::hop(links, cfg.q_vector()).xi;
  const auto grid = irs::angle_grid(-irs::kPi / 2 + 1e-6, irs::kPi / 2 - 1e-6, points);
  json outputs = json::array();
  for (int n = 0; n < scene.num_irs(); ++n) {
    const double delta = delta_deg ? irs::deg2rad(*delta_deg) : xi.delta(n);
    const auto path = out_file(c, "irs_pattern_" + std::to_string(n) + ".csv");
    std::ofstream os(path);
    irs::write_pattern_csv(os, irs::irs_radiation_pattern(scene, n, delta, grid));
    outputs.push_back(path.string());
  }
  const irs::Precoder p = irs::zf_precoder(irs::asymptotic_channel(links, xi).H(), cfg.q_vector(),
                                           cfg.radio.transmit_power_w);
  const Eigen::MatrixXd g = irs::bs_pattern(p.gamma, cfg.bs_spacing, grid);
  const auto path = out_file(c, "bs_pattern.csv");
  std::ofstream os(path);
  os << "angle_deg";
  for (int k = 0; k < g.cols(); ++k) os << ",stream" << k << "_db";
  os << '\n';
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    os << irs::rad2deg(grid[i]);
    for (Eigen::Index k = 0; k < g.cols(); ++k) os << ',' << 10.0 * std::log10(std::max(g(i, k), 1e-30));
    os << '\n';
  }
  outputs.push_back(path.string());
  return {{"command", "pattern"}, {"control", control_json(xi)}, {"outputs", outputs}};
}

json cmd_optimize(const Common& c, int trial, bool trace) {
  irs::RunConfig rc = load(c);
  auto& cfg = rc.experiment;
  cfg.newton.record_trace = trace;
  const irs::Scene scene = irs::build_scene(cfg);
  auto rng = irs::trial_rng(cfg.seed, trial);
  const irs::ChannelRealization real = irs::sample_realization(cfg, scene, rng);
  const irs::LinkGeometry links = irs::build_links(scene, real, cfg.csi == irs::CsiMode::LosOnly);
  json results = json::array();
  std::ofstream tr;
  if (trace) {
    tr.open(out_file(c, "trace.csv"));
    tr << "algorithm,start,iteration,f,step_norm\n";
  }
  for (auto a : cfg.algorithms) {
    irs::OptimResult detail;
    const irs::ControlVector xi = irs::choose_control(cfg, links, a, cfg.seed, &detail);
    const irs::Objective obj(links, cfg.q_vector(), irs::SearchMode::NRP, cfg.radio.transmit_power_w,
                             cfg.radio.noise_power_w());
    const double f = obj.value(xi);
    json r = {{"algorithm", irs::to_string(a)}, {"objective", f}, {"control", control_json(xi)}};
    const Eigen::VectorXd snr = obj.snr_db(f);
    r["snr_db"] = std::vector<double>(snr.data(), snr.data() + snr.size());
    if (a != irs::Algorithm::HOP) {
      r["starts"] = detail.starts;
      r["iterations"] = detail.iterations;
      r["converged"] = detail.converged;
      r["seconds"] = detail.seconds;
      for (std::size_t s = 0; s < detail.traces.size(); ++s)
        for (const auto& p : detail.traces[s])
          tr << irs::to_string(a) << ',' << s << ',' << p.iteration << ',' << p.f << ',' << p.step_norm << '\n';
    }
    results.push_back(r);
  }
  return {{"command", "optimize"}, {"trial", trial}, {"results", results}};
}

json cmd_validate(std::uint64_t seed, int instances, bool corrupt, bool& ok) {
  irs::ValidateOptions opt;
  opt.seed = seed;
  opt.instances = instances;
  opt.corrupt_gradient = corrupt;
  const auto checks = irs::run_validation(opt);
  json arr = json::array();
  ok = true;
  for (const auto& ch : checks) {
    ok = ok && ch.passed;
    arr.push_back({{"name", ch.name}, {"passed", ch.passed}, {"measured", ch.measured},
                   {"threshold", ch.threshold}, {"detail", ch.detail}});
    std::cerr << (ch.passed ? "PASS " : "FAIL ") << ch.name << " measured=" << ch.measured
              << " threshold=" << ch.threshold << (ch.detail.empty() ? "" : " (" + ch.detail + ")") << '\n';
  }
  return {{"command", "validate"}, {"checks", arr}, {"all_passed", ok}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimization and simulation of IRS-aided sub-THz multi-user downlinks"};
  app.require_subcommand(1, 1);
  Common sim, swp, pat, opt;

  auto* s_sim = app.add_subcommand("simulate", "Monte Carlo run: records.csv and cdf.csv");
  add_common(s_sim, sim);

  auto* s_swp = app.add_subcommand("sweep", "Sweep one variable: sweep.csv");
  add_common(s_swp, swp);
  std::string variable;
  std::vector<double> values;
  bool untie = false;
  s_swp->add_option("--variable", variable, "K, N, M1, M2, area_cm2 or bits");
  s_swp->add_option("--values", values, "Sweep values");
  s_swp->add_flag("--independent-n", untie, "Do not set N = K in K sweeps");

  auto* s_pat = app.add_subcommand("pattern", "IRS and BS radiation patterns");
  add_common(s_pat, pat);
  int pat_trial = 0, pat_points = 3601;
  std::optional<double> delta_deg;
  s_pat->add_option("--trial", pat_trial, "Realization index");
  s_pat->add_option("--delta-deg", delta_deg, "IRS rotation to plot instead of the heuristic one");
  s_pat->add_option("--points", pat_points, "Angle samples")->check(CLI::Range(2, 1000000));

  auto* s_opt = app.add_subcommand("optimize", "Optimize one realization and dump the control vector");
  add_common(s_opt, opt);
  int opt_trial = 0;
  bool trace = false;
  s_opt->add_option("--trial", opt_trial, "Realization index");
  s_opt->add_flag("--trace", trace, "Write per-start Newton traces to trace.csv");

  auto* s_val = app.add_subcommand("validate", "Run the built-in numerical oracles");
  std::uint64_t v_seed = 1;
  int v_instances = 100;
  bool corrupt = false;
  s_val->add_option("--seed", v_seed, "Oracle seed");
  s_val->add_option("--instances", v_instances, "Random instances per oracle")->check(CLI::Range(1, 100000));
  s_val->add_flag("--corrupt-gradient", corrupt, "Negative control: perturb the analytic gradient");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cout << json{{"ok", false}, {"error", e.what()}}.dump() << '\n';
    return code;
  }

  json result;
  bool ok = true;
  try {
    if (*s_sim) result = cmd_simulate(sim);
    else if (*s_swp) result = cmd_sweep(swp, variable, values, untie);
    else if (*s_pat) result = cmd_pattern(pat, pat_trial, delta_deg, pat_points);
    else if (*s_opt) result = cmd_optimize(opt, opt_trial, trace);
    else if (*s_val) result = cmd_validate(v_seed, v_instances, corrupt, ok);
  } catch (const std::exception& e) {
    std::cout << json{{"ok", false}, {"error", e.what()}}.dump() << '\n';
    return 2;
  }
  result["ok"] = ok;
  result["warnings"] = irs::warning_count();
  std::cout << result.dump(2) << '\n';
  return ok ? 0 : 1;
}
