// SPDX-License-Identifier: Apache-2.0
#include "irs/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "irs/finite.hpp"

namespace irs {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double shadowing(const ExperimentConfig& cfg, std::mt19937_64& rng) {
  if (cfg.sigma_sh_db == 0.0) return 1.0;
  std::normal_distribution<double> g(0.0, cfg.sigma_sh_db);
  const double div = cfg.shadowing_domain == ShadowingDomain::Amplitude ? 20.0 : 10.0;
  return std::pow(10.0, g(rng) / div);
}

Point2 uniform_point(const Rect& r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(r.x_min, r.x_max);
  std::uniform_real_distribution<double> uy(r.y_min, r.y_max);
  const double x = ux(rng);
  return {x, uy(rng)};
}

template <typename F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < count; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::NR: return "NR";
    case Algorithm::NRP: return "NRP";
    case Algorithm::HOP: return "HOP";
  }
  return "?";
}

std::string to_string(CsiMode m) { return m == CsiMode::Full ? "full" : "los-only"; }

Algorithm parse_algorithm(const std::string& s) {
  if (s == "NR" || s == "nr") return Algorithm::NR;
  if (s == "NRP" || s == "nrp") return Algorithm::NRP;
  if (s == "HOP" || s == "hop") return Algorithm::HOP;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected NR, NRP or HOP)");
}

Eigen::VectorXd ExperimentConfig::q_vector() const {
  const int users = K;
  if (q.empty()) return Eigen::VectorXd::Ones(users);
  require(static_cast<int>(q.size()) == users, "q must have K entries");
  return Eigen::Map<const Eigen::VectorXd>(q.data(), users);
}

void ExperimentConfig::validate() const {
  require(trials >= 1, "trials must be >= 1");
  require(K >= 1, "K must be >= 1");
  require(irs.empty() ? N >= 1 : true, "N must be >= 1");
  require(M1 >= 1, "M1 must be >= 1");
  require(M2 >= 1, "M2 must be >= 1");
  require(paths >= 0, "paths must be >= 0");
  require(sigma_sh_db >= 0, "sigma_sh_db must be >= 0");
  require(irs_area_m2 > 0, "irs area must be > 0");
  require(reflector_gain_db <= 0, "reflector_gain_db must be <= 0 (|rho| <= 1)");
  require(meta_atom_spacing > 0, "meta_atom_spacing must be > 0");
  require(!quant_bits || (*quant_bits >= 1 && *quant_bits <= 16), "quant_bits must be in [1, 16]");
  require(!algorithms.empty(), "at least one algorithm is required");
  require(starts >= 1, "starts must be >= 1");
  for (double v : q) require(v > 0, "q entries must be > 0");
  (void)q_vector();
  build_scene(*this).validate();
}

Scene build_scene(const ExperimentConfig& cfg) {
  Scene s;
  s.radio = cfg.radio;
  s.bs = BsSpec{cfg.bs_position, cfg.bs_boresight, cfg.M1, cfg.bs_spacing};
  if (!cfg.irs.empty()) {
    s.irs = cfg.irs;
  } else {
    for (int n = 0; n < cfg.N; ++n)
      s.irs.push_back(IrsSpec{{(n + 0.5) * cfg.room_width_m / cfg.N, 0.0}, cfg.irs_normal, cfg.irs_area_m2});
  }
  s.ue_region = cfg.ue_region;
  for (int k = 0; k < cfg.K; ++k) {
    UeSpec u;
    const double t = (k + 0.5) / cfg.K;
    u.position = {cfg.ue_region.x_min + t * (cfg.ue_region.x_max - cfg.ue_region.x_min),
                  0.5 * (cfg.ue_region.y_min + cfg.ue_region.y_max)};
    u.boresight = cfg.ue_boresight;
    u.elements = cfg.M2;
    u.spacing = cfg.ue_spacing;
    s.ues.push_back(u);
  }
  if (cfg.wall) s.wall = cfg.wall_spec;
  return s;
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

ChannelRealization sample_realization(const ExperimentConfig& cfg, const Scene& scene,
                                      std::mt19937_64& rng) {
  require(scene.ue_region.valid(), "ue_region must have positive extent");
  const int K = scene.num_ues(), N = scene.num_irs(), P = cfg.paths;
  const double rho_mag = std::pow(10.0, cfg.reflector_gain_db / 20.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);

  ChannelRealization r;
  for (int k = 0; k < K; ++k) r.ue_positions.push_back(uniform_point(scene.ue_region, rng));
  r.reflectors.assign(K, std::vector<std::vector<Point2>>(N));
  r.rho.assign(K, std::vector<std::vector<cplx>>(N));
  r.a2.assign(K, std::vector<std::vector<double>>(N));
  for (int k = 0; k < K; ++k) {
    std::vector<Point2> shared;
    std::vector<cplx> shared_rho;
    if (cfg.shared_reflectors) {
      for (int p = 0; p < P; ++p) shared.push_back(uniform_point(scene.ue_region, rng));
      for (int p = 0; p < P; ++p) shared_rho.push_back(std::polar(rho_mag, phase(rng)));
    }
    for (int n = 0; n < N; ++n) {
      if (cfg.shared_reflectors) {
        r.reflectors[k][n] = shared;
        r.rho[k][n] = shared_rho;
      } else {
        for (int p = 0; p < P; ++p) r.reflectors[k][n].push_back(uniform_point(scene.ue_region, rng));
        for (int p = 0; p < P; ++p) r.rho[k][n].push_back(std::polar(rho_mag, phase(rng)));
      }
      for (int p = 0; p <= P; ++p) r.a2[k][n].push_back(shadowing(cfg, rng));
    }
    r.a3.push_back(shadowing(cfg, rng));
  }
  if (cfg.shadow_bs_links)
    for (int n = 0; n < N; ++n) r.a1.push_back(shadowing(cfg, rng));
  return r;
}

double TrialRecord::mean_snr_db() const {
  if (snr_db.empty()) return std::nan("");
  return std::accumulate(snr_db.begin(), snr_db.end(), 0.0) / snr_db.size();
}

double TrialRecord::mean_rate() const {
  if (rate.empty()) return std::nan("");
  return std::accumulate(rate.begin(), rate.end(), 0.0) / rate.size();
}

ControlVector choose_control(const ExperimentConfig& cfg, const LinkGeometry& links, Algorithm alg,
                             std::uint64_t optimizer_seed, OptimResult* detail) {
  const Eigen::VectorXd q = cfg.q_vector();
  std::optional<ControlVector> heuristic;
  try {
    heuristic = hop(links, q).xi;
  } catch (const NoFeasibleAssignment&) {
    if (alg == Algorithm::HOP) throw;
  }
  if (alg == Algorithm::HOP) return *heuristic;
  const SearchMode mode = alg == Algorithm::NR ? SearchMode::NR : SearchMode::NRP;
  const Objective obj(links, q, mode, cfg.radio.transmit_power_w, cfg.radio.noise_power_w());
  MultistartOptions opt;
  opt.starts = cfg.starts;
  opt.seed = optimizer_seed;
  opt.newton = cfg.newton;
  OptimResult r = multistart(obj, opt, heuristic);
  if (detail) *detail = r;
  return r.xi;
}

Eigen::MatrixXcd evaluation_channel(const ExperimentConfig& cfg, const LinkGeometry& links,
                                    const ControlVector& xi) {
  if (!cfg.finite_evaluation && !cfg.quant_bits) return asymptotic_channel(links, xi).H();
  std::vector<int> sides;
  for (double ap : links.aperture)  // sqrt(A) / lambda
    sides.push_back(std::max(1, static_cast<int>(std::ceil(ap / cfg.meta_atom_spacing - 1e-9))));
  PhaseProfiles prof = profiles_for(links, xi, sides);
  if (cfg.quant_bits)
    for (auto& p : prof) p = quantize_profile(p, *cfg.quant_bits);
  return finite_channel(links, xi.alpha, prof);
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, const Scene& scene, int trial) {
  std::mt19937_64 rng = trial_rng(cfg.seed, static_cast<std::uint64_t>(trial));
  const ChannelRealization real = sample_realization(cfg, scene, rng);
  const LinkGeometry truth = build_links(scene, real);
  const bool partial = cfg.csi == CsiMode::LosOnly;
  const LinkGeometry known = partial ? build_links(scene, real, true) : truth;
  const Eigen::VectorXd q = cfg.q_vector();
  const double pt = cfg.radio.transmit_power_w;
  const double noise = cfg.radio.noise_power_w();

  std::vector<TrialRecord> out;
  for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
    const auto t0 = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.trial = trial;
    rec.algorithm = cfg.algorithms[a];
    try {
      const std::uint64_t opt_seed = mix(mix(cfg.seed) ^ (static_cast<std::uint64_t>(trial) << 8) ^ a);
      const ControlVector xi = choose_control(cfg, known, rec.algorithm, opt_seed);
      const Eigen::MatrixXcd H = evaluation_channel(cfg, truth, xi);
      SnrReport rep;
      if (partial) {
        const Precoder p = zf_precoder(evaluation_channel(cfg, known, xi), q, pt);
        rep = sinr_with_precoder(H, p, noise);
        rep.objective = Objective(truth, q, SearchMode::NRP, pt, noise).value(xi);
      } else {
        rep = snr_per_ue(H, q, pt, noise);
      }
      rec.snr_db.assign(rep.snr_db.data(), rep.snr_db.data() + rep.snr_db.size());
      rec.rate.assign(rep.rate.data(), rep.rate.data() + rep.rate.size());
      rec.objective = rep.objective;
      rec.condition = rep.condition;
      rec.ok = true;
    } catch (const IllConditioned& e) {
      rec.condition = e.condition();
      rec.error = e.what();
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  const Scene scene = build_scene(cfg);
  std::vector<std::vector<TrialRecord>> per_trial(cfg.trials);
  parallel_for(cfg.trials, threads, [&](int t) { per_trial[t] = run_trial(cfg, scene, t); });
  std::vector<TrialRecord> out;
  for (auto& v : per_trial)
    for (auto& r : v) out.push_back(std::move(r));
  return out;
}

CdfSeries cdf(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("cdf needs at least one value");
  std::sort(values.begin(), values.end());
  CdfSeries c;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) c.probability.push_back((i + 1) / n);
  c.values = std::move(values);
  return c;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("quantile needs at least one value");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 1.0) * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

std::vector<double> snr_samples(const std::vector<TrialRecord>& records, Algorithm alg) {
  std::vector<double> v;
  for (const auto& r : records)
    if (r.algorithm == alg && r.ok) v.push_back(r.mean_snr_db());
  return v;
}

Summary summarize(const std::vector<TrialRecord>& records, Algorithm alg, int users,
                  double bandwidth_hz) {
  Summary s;
  s.algorithm = alg;
  std::vector<double> db, rates;
  double lin = 0.0;
  for (const auto& r : records) {
    if (r.algorithm != alg) continue;
    ++s.trials;
    if (!r.ok) {
      ++s.failures;
      continue;
    }
    db.push_back(r.mean_snr_db());
    rates.push_back(r.mean_rate());
    for (double x : r.snr_db) lin += std::pow(10.0, x / 10.0) / r.snr_db.size();
  }
  if (db.empty()) {
    s.mean_snr_db = s.median_snr_db = s.p10_snr_db = s.p90_snr_db = std::nan("");
    s.mean_snr_linear_db = s.std_snr_db = std::nan("");
    return s;
  }
  const double n = static_cast<double>(db.size());
  s.mean_snr_db = std::accumulate(db.begin(), db.end(), 0.0) / n;
  s.mean_snr_linear_db = 10.0 * std::log10(lin / n);
  double var = 0.0;
  for (double x : db) var += (x - s.mean_snr_db) * (x - s.mean_snr_db);
  s.std_snr_db = std::sqrt(var / n);
  s.median_snr_db = quantile(db, 0.5);
  s.p10_snr_db = quantile(db, 0.1);
  s.p90_snr_db = quantile(db, 0.9);
  s.mean_rate = std::accumulate(rates.begin(), rates.end(), 0.0) / n;
  s.throughput_gbps = throughput_gbps(rates, users, bandwidth_hz);
  return s;
}

void apply_sweep_value(ExperimentConfig& cfg, const std::string& variable, double value,
                       bool tie_n_to_k) {
  const int iv = static_cast<int>(std::lround(value));
  if (variable == "K") {
    cfg.K = iv;
    if (tie_n_to_k) cfg.N = iv;
  } else if (variable == "N") {
    cfg.N = iv;
  } else if (variable == "M1") {
    cfg.M1 = iv;
  } else if (variable == "M2") {
    cfg.M2 = iv;
  } else if (variable == "area_cm2") {
    cfg.irs_area_m2 = value * 1e-4;
  } else if (variable == "bits") {
    if (iv <= 0) {
      cfg.quant_bits.reset();
      cfg.finite_evaluation = true;
    } else {
      cfg.quant_bits = iv;
    }
  } else {
    throw std::invalid_argument("unknown sweep variable '" + variable +
                                "' (expected K, N, M1, M2, area_cm2 or bits)");
  }
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& variable,
                                  const std::vector<double>& values, bool tie_n_to_k, int threads) {
  require(!values.empty(), "sweep needs at least one value");
  std::vector<SweepPoint> out;
  for (double v : values) {
    ExperimentConfig cfg = base;
    apply_sweep_value(cfg, variable, v, tie_n_to_k);
    const auto records = run_experiment(cfg, threads);
    SweepPoint p;
    p.x = v;
    p.users = cfg.K;
    for (Algorithm a : cfg.algorithms)
      p.summaries.push_back(summarize(records, a, cfg.K, cfg.radio.bandwidth_hz));
    out.push_back(std::move(p));
  }
  return out;
}

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records) {
  os << "trial,algorithm,ok,mean_snr_db,mean_rate,objective,condition,seconds,snr_db_per_ue,error\n";
  os.precision(12);
  for (const auto& r : records) {
    os << r.trial << ',' << to_string(r.algorithm) << ',' << (r.ok ? 1 : 0) << ',';
    if (r.ok) os << r.mean_snr_db() << ',' << r.mean_rate();
    else os << ',';
    os << ',' << r.objective << ',' << r.condition << ',' << r.seconds << ',';
    for (std::size_t k = 0; k < r.snr_db.size(); ++k) os << (k ? ";" : "") << r.snr_db[k];
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << ',' << err << '\n';
  }
}

void write_cdf_csv(std::ostream& os, const std::vector<TrialRecord>& records,
                   const std::vector<Algorithm>& algorithms) {
  os << "algorithm,snr_db,probability\n";
  os.precision(12);
  for (Algorithm a : algorithms) {
    const auto v = snr_samples(records, a);
    if (v.empty()) continue;
    const CdfSeries c = cdf(v);
    for (std::size_t i = 0; i < c.values.size(); ++i)
      os << to_string(a) << ',' << c.values[i] << ',' << c.probability[i] << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::string& variable,
                     const std::vector<SweepPoint>& points) {
  os << "variable,x,algorithm,mean_snr_db,mean_snr_linear_db,median_snr_db,throughput_gbps,trials,"
        "failures\n";
  os.precision(12);
  for (const auto& p : points)
    for (const auto& s : p.summaries)
      os << variable << ',' << p.x << ',' << to_string(s.algorithm) << ',' << s.mean_snr_db << ','
         << s.mean_snr_linear_db << ',' << s.median_snr_db << ',' << s.throughput_gbps << ','
         << s.trials << ',' << s.failures << '\n';
}

}  // namespace irs
