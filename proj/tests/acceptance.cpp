// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance gate. Each criterion prints one PASS/FAIL line with
// the measured value and its pinned tolerance; the exit status is nonzero if
// any criterion fails. Pass one or more criterion numbers to run a subset.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "irs/assignment.hpp"
#include "irs/channel.hpp"
#include "irs/harness.hpp"
#include "irs/validate.hpp"

using namespace irs;

namespace {

// Trial counts and tolerances. Changing these changes what the gate means.
constexpr int kWallTrials = 1000;
constexpr int kOptimizerTrials = 100;
constexpr int kSweepTrials = 200;
constexpr int kThroughputTrials = 100;

struct Outcome {
  bool pass = false;
  std::string measured;
};

int threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0, double e = 0,
                double g = 0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a, b, c, d, e, g);
  return buf;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

double mean_db(const ExperimentConfig& cfg, Algorithm alg = Algorithm::HOP) {
  return summarize(run_experiment(cfg, threads()), alg, cfg.K, cfg.radio.bandwidth_hz).mean_snr_db;
}

// Single IRS, single UE, line-of-sight only.
ExperimentConfig single_link(double area_cm2, int m2, bool wall) {
  ExperimentConfig cfg;
  cfg.K = cfg.N = 1;
  cfg.M1 = 4;
  cfg.M2 = m2;
  cfg.irs_area_m2 = area_cm2 * 1e-4;
  cfg.wall = wall;
  cfg.trials = kWallTrials;
  cfg.seed = 1;
  return cfg;
}

// Multi-user setting with multipath and shadowing, wall neglected.
ExperimentConfig multipath(int users, int m1, int m2) {
  ExperimentConfig cfg;
  cfg.K = cfg.N = users;
  cfg.M1 = m1;
  cfg.M2 = m2;
  cfg.irs_area_m2 = 1e-2;
  cfg.paths = 2;
  cfg.sigma_sh_db = 2.0;
  cfg.reflector_gain_db = -10.0;
  cfg.seed = 7;
  return cfg;
}

Outcome c1() {
  const double small = mean_db(single_link(1, 1, false));
  const double large = mean_db(single_link(100, 1, false));
  const double gap = large - small;
  return {within(gap, 40.0, 0.2), fmt("gain %.3f dB (A=1: %.2f dB, A=100: %.2f dB); want 40 +- 0.2", gap, small, large)};
}

Outcome c2() {
  const double one = mean_db(single_link(100, 1, false));
  const double four = mean_db(single_link(100, 4, false));
  const double gap = four - one;
  return {within(gap, 6.0, 0.3), fmt("gap %.3f dB; want 6 +- 0.3", gap)};
}

Outcome c3() {
  const double small = mean_db(single_link(1, 1, true)) - mean_db(single_link(1, 1, false));
  const double large = mean_db(single_link(100, 1, true)) - mean_db(single_link(100, 1, false));
  return {within(small, 25.0, 3.0) && large <= 2.0,
          fmt("wall gain %.2f dB at 1 cm2 (want 25 +- 3), %.2f dB at 100 cm2 (want <= 2)", small, large)};
}

Outcome c4() {
  ExperimentConfig cfg = single_link(1, 4, true);
  cfg.trials = kOptimizerTrials;
  cfg.algorithms = {Algorithm::NR, Algorithm::NRP};
  const auto recs = run_experiment(cfg, threads());
  const auto nr = snr_samples(recs, Algorithm::NR);
  const auto nrp = snr_samples(recs, Algorithm::NRP);
  bool ok = !nr.empty() && !nrp.empty();
  double gaps[3];
  const double ps[3] = {0.25, 0.5, 0.75};
  for (int i = 0; i < 3; ++i) {
    gaps[i] = quantile(nrp, ps[i]) - quantile(nr, ps[i]);
    ok = ok && gaps[i] >= 1.0 - 1.0 && gaps[i] <= 4.0 + 1.0;
  }
  return {ok, fmt("NRP - NR at CDF 25/50/75%%: %.2f / %.2f / %.2f dB; want each in [0, 5]", gaps[0], gaps[1], gaps[2])};
}

Outcome c5() {
  ExperimentConfig cfg = multipath(4, 32, 4);
  cfg.trials = kOptimizerTrials;
  cfg.algorithms = {Algorithm::HOP, Algorithm::NRP};
  const auto recs = run_experiment(cfg, threads());
  std::vector<double> diff;
  for (std::size_t i = 0; i + 1 < recs.size(); i += 2) {
    if (recs[i].ok && recs[i + 1].ok) diff.push_back(std::abs(recs[i].mean_snr_db() - recs[i + 1].mean_snr_db()));
  }
  const double med = diff.empty() ? 1e9 : quantile(diff, 0.5);
  return {med <= 1.0, fmt("median |HOP - NRP| %.3f dB over %.0f trials; want <= 1", med, double(diff.size()))};
}

Outcome c6() {
  ExperimentConfig cfg = multipath(8, 32, 4);
  cfg.trials = kSweepTrials;
  cfg.finite_evaluation = true;
  const double cont = mean_db(cfg);
  double loss[3];
  const double target[3] = {4.7, 1.0, 0.2}, tol[3] = {1.0, 0.5, 0.3};
  bool ok = true;
  for (int b = 1; b <= 3; ++b) {
    cfg.quant_bits = b;
    loss[b - 1] = cont - mean_db(cfg);
    ok = ok && within(loss[b - 1], target[b - 1], tol[b - 1]);
  }
  return {ok, fmt("loss b=1/2/3: %.2f / %.2f / %.2f dB; want 4.7+-1.0 / 1.0+-0.5 / 0.2+-0.3", loss[0], loss[1], loss[2])};
}

Outcome c7() {
  ExperimentConfig cfg = multipath(1, 32, 4);
  cfg.trials = kSweepTrials;
  const auto pts = run_sweep(cfg, "K", {1, 2, 4, 8, 12}, true, threads());
  double s[5];
  for (int i = 0; i < 5; ++i) s[i] = pts[i].summaries[0].mean_snr_db;
  const double d12 = s[0] - s[1], d24 = s[1] - s[2], d812 = s[3] - s[4];
  const bool ok = within(d12, 3.0, 1.0) && within(d24, 3.0, 1.0) && d812 > 10.0;
  return {ok, fmt("mean SNR K=1,2,4,8,12: %.1f %.1f %.1f %.1f %.1f dB", s[0], s[1], s[2], s[3], s[4]) +
                  fmt("; drops 1->2 %.2f, 2->4 %.2f (want 3 +- 1), 8->12 %.2f (want > 10)", d12, d24, d812)};
}

Outcome c8() {
  struct Peak {
    double k = 0, gbps = 0;
  };
  auto peak_of = [](int m1, const std::vector<double>& ks, std::string& curve) {
    ExperimentConfig cfg = multipath(1, m1, 8);
    cfg.trials = kThroughputTrials;
    Peak p;
    for (const SweepPoint& pt : run_sweep(cfg, "K", ks, true, threads())) {
      const Summary& s = pt.summaries[0];
      curve += fmt(" %.0f:%.1f", pt.x, s.throughput_gbps);
      if (s.failures > 0) curve += fmt("(%.0f fail)", s.failures);
      if (s.throughput_gbps > p.gbps) p = {pt.x, s.throughput_gbps};
    }
    return p;
  };
  std::string c128, c64;
  const Peak p128 = peak_of(128, {4, 8, 12, 16, 20, 24, 28, 32, 36, 40}, c128);
  const Peak p64 = peak_of(64, {4, 8, 12, 16, 20, 24, 28}, c64);
  const double ratio = p128.gbps / p64.gbps;
  const bool ok = within(p128.k, 20.0, 4.0) && within(p128.gbps, 32.0, 0.25 * 32.0) && within(ratio, 2.0, 0.5);
  return {ok, fmt("M1=128 peak K*=%.0f at %.1f Gb/s (want 20 +- 4, 32 +- 8); M1=64 peak %.1f Gb/s at K=%.0f; ratio %.2f (want 2 +- 0.5)",
                  p128.k, p128.gbps, p64.gbps, p64.k, ratio) +
                  "; curve M1=128" + c128 + "; M1=64" + c64};
}

// Criteria 9-13 come from the built-in oracle suite.
std::vector<OracleCheck> oracle_cache;
const OracleCheck& oracle(const std::string& name) {
  if (oracle_cache.empty()) {
    ValidateOptions opt;
    opt.seed = 1;
    opt.instances = 100;
    oracle_cache = run_validation(opt);
  }
  for (const auto& c : oracle_cache)
    if (c.name == name) return c;
  throw std::logic_error("missing oracle " + name);
}

Outcome from_oracles(std::initializer_list<const char*> names) {
  Outcome o{true, ""};
  for (const char* n : names) {
    const OracleCheck& c = oracle(n);
    o.pass = o.pass && c.passed;
    if (!o.measured.empty()) o.measured += "; ";
    o.measured += std::string(n) + fmt(" %.3g (limit %.3g)", c.measured, c.threshold);
    if (!c.detail.empty()) o.measured += " [" + c.detail + "]";
  }
  return o;
}

Outcome c14() {
  // IRS at the origin facing +y; the BS sits at 36.8 degrees off the normal.
  Scene s;
  const double phi1 = deg2rad(36.8);
  s.bs.position = {-5.0 * std::sin(phi1), 5.0 * std::cos(phi1)};
  s.bs.boresight = -kPi / 2 + phi1;
  s.irs = {IrsSpec{{0.0, 0.0}, kPi / 2, 1e-2}};
  const auto grid = angle_grid(deg2rad(-89.0), deg2rad(89.0), 178001);
  const auto pat = irs_radiation_pattern(s, 0, deg2rad(17.2), grid);
  const auto peak = std::max_element(pat.begin(), pat.end(),
                                     [](const PatternSample& a, const PatternSample& b) { return a.gain < b.gain; });
  auto it = peak;
  while (std::next(it) != pat.end() && std::next(it)->gain <= it->gain) ++it;
  const double width = rad2deg(it->angle - peak->angle);
  const double aod = rad2deg(peak->angle);
  const bool ok = within(width, 1.7, 0.5) && within(aod, 2.4, 0.1);
  return {ok, fmt("first-null width %.3f deg (want 1.7 +- 0.5); AoD %.3f deg for AoA 36.8, delta 17.2 (want 2.4 +- 0.1)", width, aod)};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "area-squared scaling", c1},
      {2, "UE array gain", c2},
      {3, "wall dominance at small area", c3},
      {4, "phase-shift benefit NRP vs NR", c4},
      {5, "heuristic optimality at large area", c5},
      {6, "quantization losses", c6},
      {7, "user-scaling knee", c7},
      {8, "throughput peak", c8},
      {9, "finite-to-asymptotic convergence", [] { return from_oracles({"finite_to_asymptotic"}); }},
      {10, "derivative correctness",
       [] { return from_oracles({"gradient_vs_finite_difference", "hessian_vs_finite_difference"}); }},
      {11, "Hungarian exactness", [] { return from_oracles({"hungarian_vs_exhaustive"}); }},
      {12, "two-user assignment corner", [] { return from_oracles({"two_user_assignment_corner"}); }},
      {13, "zero-forcing identity", [] { return from_oracles({"zero_forcing_identity"}); }},
      {14, "beam geometry", c14},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.measured.c_str(), sec);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d criterion(s) failed\n", failed);
  return failed == 0 ? 0 : 1;
}
