// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo experiments: random realizations, per-algorithm optimization,
// SNR evaluation on the true channel, and summary statistics.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "irs/assignment.hpp"
#include "irs/channel.hpp"
#include "irs/optimize.hpp"
#include "irs/precoding.hpp"

namespace irs {

enum class Algorithm { NR, NRP, HOP };
enum class CsiMode { Full, LosOnly };
enum class ShadowingDomain { Amplitude, Power };

std::string to_string(Algorithm a);
std::string to_string(CsiMode m);
Algorithm parse_algorithm(const std::string& s);

struct ExperimentConfig {
  RadioParams radio;

  Point2 bs_position{0.0, 5.0};
  double bs_boresight = 0.0;
  int M1 = 4;
  double bs_spacing = 0.5;

  int N = 1;
  double irs_area_m2 = 1e-2;
  double irs_normal = kPi / 2;
  double room_width_m = 10.0;      // IRS n centered at ((n + 0.5) W / N, 0)
  std::vector<IrsSpec> irs;        // explicit placement; overrides N and the layout

  int K = 1;
  int M2 = 1;
  double ue_spacing = 0.5;
  double ue_boresight = -kPi / 2;
  Rect ue_region;

  bool wall = false;
  WallSpec wall_spec{{0.0, 0.0}, {10.0, 0.0}, WallSpec::plasterboard_table()};

  int paths = 0;                    // NLoS reflectors per IRS-UE link
  double sigma_sh_db = 0.0;
  ShadowingDomain shadowing_domain = ShadowingDomain::Amplitude;
  bool shadow_bs_links = false;
  double reflector_gain_db = -10.0; // |rho_knp|^2
  bool shared_reflectors = false;   // one reflector set per UE, shared by all IRSs

  CsiMode csi = CsiMode::Full;
  bool finite_evaluation = false;   // evaluate on the finite meta-atom grid
  std::optional<int> quant_bits;    // implies finite evaluation
  double meta_atom_spacing = 0.25;  // max pitch in wavelengths for finite evaluation

  std::vector<double> q;            // empty means Q = I
  std::vector<Algorithm> algorithms{Algorithm::HOP};
  int starts = 100;
  NewtonOptions newton;

  int trials = 100;
  std::uint64_t seed = 1;

  Eigen::VectorXd q_vector() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Scene template for a configuration; UE positions are placeholders.
Scene build_scene(const ExperimentConfig& cfg);

/// RNG for trial `trial`, independent of every other trial.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

ChannelRealization sample_realization(const ExperimentConfig& cfg, const Scene& scene,
                                      std::mt19937_64& rng);

struct TrialRecord {
  int trial = 0;
  Algorithm algorithm = Algorithm::HOP;
  bool ok = false;
  std::vector<double> snr_db;
  std::vector<double> rate;
  double objective = 0.0;
  double condition = 0.0;
  double seconds = 0.0;
  std::string error;

  double mean_snr_db() const;
  double mean_rate() const;
};

/// Control vector chosen by one algorithm for one realization.
ControlVector choose_control(const ExperimentConfig& cfg, const LinkGeometry& csi_links,
                             Algorithm alg, std::uint64_t optimizer_seed, OptimResult* detail = nullptr);

/// Channel used for SNR evaluation at xi: asymptotic, or finite (optionally quantized).
Eigen::MatrixXcd evaluation_channel(const ExperimentConfig& cfg, const LinkGeometry& links,
                                    const ControlVector& xi);

/// One trial, every configured algorithm, in configuration order.
std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, const Scene& scene, int trial);

/// All trials; record order is (trial, algorithm) regardless of `threads`.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg, int threads = 1);

struct CdfSeries {
  std::vector<double> values;       // sorted
  std::vector<double> probability;  // i / n
};
CdfSeries cdf(std::vector<double> values);

/// Linear-interpolated empirical quantile, p in [0, 1].
double quantile(std::vector<double> values, double p);

struct Summary {
  Algorithm algorithm = Algorithm::HOP;
  int trials = 0;
  int failures = 0;
  double mean_snr_db = 0.0;         // mean of dB values
  double mean_snr_linear_db = 0.0;  // dB of the linear mean
  double median_snr_db = 0.0;
  double p10_snr_db = 0.0;
  double p90_snr_db = 0.0;
  double std_snr_db = 0.0;
  double mean_rate = 0.0;           // bit/s/Hz per user
  double throughput_gbps = 0.0;     // K B mean rate
};

/// Statistics of one algorithm over successful trials. `users` and
/// `bandwidth_hz` give the throughput scale.
Summary summarize(const std::vector<TrialRecord>& records, Algorithm alg, int users,
                  double bandwidth_hz);

/// Per-trial SNR in dB (UE mean) of successful records of one algorithm.
std::vector<double> snr_samples(const std::vector<TrialRecord>& records, Algorithm alg);

struct SweepPoint {
  double x = 0.0;
  int users = 0;
  std::vector<Summary> summaries;  // one per configured algorithm
};

/// Variable names: K (with N = K when `tie_n_to_k`), N, M1, M2, area_cm2, bits.
void apply_sweep_value(ExperimentConfig& cfg, const std::string& variable, double value,
                       bool tie_n_to_k);
std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& variable,
                                  const std::vector<double>& values, bool tie_n_to_k, int threads);

void write_records_csv(std::ostream& os, const std::vector<TrialRecord>& records);
void write_cdf_csv(std::ostream& os, const std::vector<TrialRecord>& records,
                   const std::vector<Algorithm>& algorithms);
void write_sweep_csv(std::ostream& os, const std::string& variable,
                     const std::vector<SweepPoint>& points);

}  // namespace irs
