// SPDX-License-Identifier: Apache-2.0
#include "irs/precoding.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "irs/channel.hpp"

namespace irs {
namespace {

struct GramSolve {
  Eigen::MatrixXcd X;  // (HH^H)^-1 Q^(1/2)
  double condition;
};

GramSolve solve_gram(const Eigen::MatrixXcd& H, const Eigen::VectorXd& q) {
  if (H.rows() > H.cols()) throw std::invalid_argument("zero-forcing needs K <= M1");
  if (q.size() != H.rows() || (q.array() <= 0).any())
    throw std::invalid_argument("Q must be positive with K entries");
  const double cond = gram_condition(H);
  if (!(cond <= kMaxGramCondition)) throw IllConditioned(cond);
  const Eigen::MatrixXcd G = H * H.adjoint();
  const Eigen::LLT<Eigen::MatrixXcd> llt(G);
  if (llt.info() != Eigen::Success) throw IllConditioned(std::numeric_limits<double>::infinity());
  const Eigen::MatrixXcd sq = q.cwiseSqrt().cast<cplx>().asDiagonal();
  return {llt.solve(sq), cond};
}

}  // namespace

IllConditioned::IllConditioned(double condition)
    : std::runtime_error("ill-conditioned channel Gram matrix (condition number " +
                         std::to_string(condition) + ")"),
      condition_(condition) {}

double gram_condition(const Eigen::MatrixXcd& H) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H * H.adjoint(), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(hi > 0) || !(lo > 0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Precoder zf_precoder(const Eigen::MatrixXcd& H, const Eigen::VectorXd& q, double pt) {
  if (!(pt > 0)) throw std::invalid_argument("transmit power must be > 0");
  const GramSolve s = solve_gram(H, q);
  const Eigen::MatrixXcd unscaled = H.adjoint() * s.X;  // H^+ Q^(1/2)
  Precoder p;
  p.scale = std::sqrt(pt) / unscaled.norm();
  p.gamma = p.scale * unscaled;
  p.q = q;
  return p;
}

SnrReport snr_per_ue(const Eigen::MatrixXcd& H, const Eigen::VectorXd& q, double pt, double noise) {
  const GramSolve s = solve_gram(H, q);
  // ||H^+ Q^(1/2)||_F^2 = Tr{Q^(1/2) (HH^H)^-1 Q^(1/2)} = Tr{(HH^H)^-1 Q}.
  const Eigen::VectorXd sq = q.cwiseSqrt();
  double f = 0.0;
  for (Eigen::Index k = 0; k < q.size(); ++k) f += sq(k) * s.X(k, k).real();
  SnrReport r;
  r.objective = f;
  r.condition = s.condition;
  r.snr = (pt / (noise * f)) * q;
  r.snr_db = r.snr.unaryExpr([](double x) { return 10.0 * std::log10(x); });
  r.rate = r.snr.unaryExpr([](double x) { return std::log2(1.0 + x); });
  return r;
}

SnrReport sinr_with_precoder(const Eigen::MatrixXcd& H_true, const Precoder& p, double noise) {
  const Eigen::MatrixXcd E = H_true * p.gamma;  // K x K effective channel
  SnrReport r;
  r.snr.resize(E.rows());
  for (Eigen::Index k = 0; k < E.rows(); ++k) {
    const double sig = std::norm(E(k, k));
    const double interference = E.row(k).squaredNorm() - sig;
    r.snr(k) = sig / (interference + noise);
  }
  r.snr_db = r.snr.unaryExpr([](double x) { return 10.0 * std::log10(x); });
  r.rate = r.snr.unaryExpr([](double x) { return std::log2(1.0 + x); });
  r.condition = gram_condition(H_true);
  r.objective = std::numeric_limits<double>::quiet_NaN();
  return r;
}

double throughput_gbps(const std::vector<double>& rates, int users, double bandwidth_hz) {
  if (rates.empty()) throw std::invalid_argument("throughput needs at least one trial");
  const double mean = std::accumulate(rates.begin(), rates.end(), 0.0) / rates.size();
  return users * bandwidth_hz * mean / 1e9;
}

Eigen::MatrixXd bs_pattern(const Eigen::MatrixXcd& gamma, double spacing,
                           const std::vector<double>& angles) {
  Eigen::MatrixXd out(angles.size(), gamma.cols());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!(std::abs(angles[i]) < kPi / 2))
      throw std::invalid_argument("pattern angles must lie in (-90, 90) deg");
    const Eigen::VectorXcd s = steering_vector(spacing, static_cast<int>(gamma.rows()), angles[i]);
    out.row(i) = (s.adjoint() * gamma).cwiseAbs2();
  }
  return out;
}

}  // namespace irs
