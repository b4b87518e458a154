// SPDX-License-Identifier: Apache-2.0
//
// Zero-forcing precoding, per-user SNR and throughput.
#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace irs {

inline constexpr double kMaxGramCondition = 1e12;

/// Thrown when HH^H is singular or its condition number exceeds kMaxGramCondition.
class IllConditioned : public std::runtime_error {
 public:
  explicit IllConditioned(double condition);
  double condition() const { return condition_; }

 private:
  double condition_;
};

struct Precoder {
  Eigen::MatrixXcd gamma;  // M1 x K
  double scale = 0.0;      // a
  Eigen::VectorXd q;       // diagonal of Q
};

/// Condition number of the Hermitian positive semidefinite Gram matrix HH^H
/// (ratio of extreme eigenvalues; +inf when singular).
double gram_condition(const Eigen::MatrixXcd& H);

/// Gamma = a H^+ Q^(1/2), a = sqrt(Pt) / ||H^+ Q^(1/2)||_F, using the K x K Gram system.
Precoder zf_precoder(const Eigen::MatrixXcd& H, const Eigen::VectorXd& q, double pt);

struct SnrReport {
  Eigen::VectorXd snr;     // linear
  Eigen::VectorXd snr_db;
  Eigen::VectorXd rate;    // bit/s/Hz, log2(1 + snr)
  double objective = 0.0;  // Tr{(HH^H)^-1 Q}
  double condition = 0.0;
};

/// SNR_k = Pt q_k / (sigma^2 Tr{(HH^H)^-1 Q}).
SnrReport snr_per_ue(const Eigen::MatrixXcd& H, const Eigen::VectorXd& q, double pt, double noise);

/// SINR of a precoder designed on one channel, measured on another.
SnrReport sinr_with_precoder(const Eigen::MatrixXcd& H_true, const Precoder& p, double noise);

/// K * B * mean(rate) in Gbit/s. `rates` holds the per-user rate of each trial.
double throughput_gbps(const std::vector<double>& rates, int users, double bandwidth_hz);

/// |s(D, M1, beta)^H gamma_k|^2 for each angle (rows) and stream (columns).
Eigen::MatrixXd bs_pattern(const Eigen::MatrixXcd& gamma, double spacing,
                           const std::vector<double>& angles);

}  // namespace irs
