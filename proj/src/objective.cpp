// SPDX-License-Identifier: Apache-2.0
//
// Derivatives. Every first and second partial of H is rank one,
// H_x = a_x b_x^H. With K = HH^H, W = K^-1, Z = W Q W and c_x = H b_x:
//
//   df/dx      = -2 Re(c_x^H Z a_x)
//   d2f/dx dy  = Re Tr{Z (2 K_y W K_x - K_xy)}
//
// where K_x = a_x c_x^H + c_x a_x^H and
// Tr{Z K_xy} = 2 Re(c_xy^H Z a_xy) + 2 Re((b_x^H b_y)(a_y^H Z a_x)).
#include <cmath>
#include <limits>
#include <stdexcept>

#include "irs/optimize.hpp"

namespace irs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap(double x, double lo, double period) {
  return x - period * std::floor((x - lo) / period);
}

}  // namespace

Objective::Objective(LinkGeometry links, Eigen::VectorXd q, SearchMode mode, double pt, double noise)
    : links_(std::move(links)), q_(std::move(q)), mode_(mode), pt_(pt), noise_(noise) {
  if (q_.size() != links_.K || (q_.array() <= 0).any())
    throw std::invalid_argument("Q must be positive with K entries");
  if (!(pt_ > 0) || !(noise_ > 0)) throw std::invalid_argument("power and noise must be > 0");
}

int Objective::dimension() const {
  return (mode_ == SearchMode::NRP ? 2 * links_.N : links_.N) + links_.K;
}

Eigen::VectorXd Objective::pack(const ControlVector& xi) const {
  xi.check(links_.N, links_.K);
  Eigen::VectorXd x(dimension());
  if (mode_ == SearchMode::NRP)
    x << xi.delta, xi.psi, xi.alpha;
  else
    x << xi.delta, xi.alpha;
  return x;
}

ControlVector Objective::unpack(const Eigen::VectorXd& x) const {
  if (x.size() != dimension()) throw std::invalid_argument("packed vector has wrong dimension");
  const int N = links_.N, K = links_.K;
  ControlVector xi;
  xi.delta = x.head(N);
  if (mode_ == SearchMode::NRP) {
    xi.psi = x.segment(N, N);
    xi.alpha = x.tail(K);
  } else {
    xi.psi = Eigen::VectorXd::Zero(N);
    xi.alpha = x.tail(K);
  }
  return xi;
}

void Objective::canonicalize(Eigen::VectorXd& x) const {
  const int N = links_.N, K = links_.K;
  for (int n = 0; n < N; ++n) x(n) = wrap(x(n), -kPi / 2, kPi);
  if (mode_ == SearchMode::NRP)
    for (int n = N; n < 2 * N; ++n) x(n) = wrap(x(n), 0.0, 2 * kPi);
  for (int i = dimension() - K; i < dimension(); ++i) x(i) = std::asin(std::sin(x(i)));
}

ControlVector canonical(ControlVector xi) {
  for (auto& d : xi.delta) d = wrap(d, -kPi / 2, kPi);
  for (auto& p : xi.psi) p = wrap(p, 0.0, 2 * kPi);
  for (auto& a : xi.alpha) a = std::asin(std::sin(a));
  return xi;
}

Eigen::VectorXd Objective::snr_db(double f) const {
  return q_.unaryExpr([&](double q) { return 10.0 * std::log10(pt_ * q / (noise_ * f)); });
}

double Objective::value(const Eigen::VectorXd& x) const {
  double f = kInf;
  evaluate(x, &f, nullptr, nullptr);
  return f;
}

Eigen::VectorXd Objective::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g;
  if (!evaluate(x, nullptr, &g, nullptr)) throw std::domain_error("objective is not finite");
  return g;
}

Eigen::MatrixXd Objective::hessian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd h;
  if (!evaluate(x, nullptr, nullptr, &h)) throw std::domain_error("objective is not finite");
  return h;
}

bool Objective::evaluate(const Eigen::VectorXd& x, double* f_out, Eigen::VectorXd* grad,
                         Eigen::MatrixXd* hess) const {
  const LinkGeometry& g = links_;
  const int N = g.N, K = g.K;
  const ControlVector xi = unpack(x);
  const ChannelJets J = channel_jets(g, xi);

  Eigen::VectorXcd e(N);
  for (int n = 0; n < N; ++n) e(n) = std::polar(1.0, xi.psi(n));
  const Eigen::MatrixXcd H = J.M * e.asDiagonal() * g.V1.adjoint() + J.T.asDiagonal() * g.V3.adjoint();
  const Eigen::LLT<Eigen::MatrixXcd> llt(H * H.adjoint());
  if (llt.info() != Eigen::Success) {
    if (f_out) *f_out = kInf;
    return false;
  }
  const Eigen::MatrixXcd W = llt.solve(Eigen::MatrixXcd::Identity(K, K));
  double f = 0.0;
  for (int k = 0; k < K; ++k) f += q_(k) * W(k, k).real();
  if (!std::isfinite(f) || !(f > 0)) {
    if (f_out) *f_out = kInf;
    return false;
  }
  if (f_out) *f_out = f;
  if (!grad && !hess) return true;

  // Full variable order [delta (N), psi (N), alpha (K)].
  const int nf = 2 * N + K;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(K, nf);
  Eigen::MatrixXcd B(g.M1, nf);
  const cplx j1{0.0, 1.0};
  for (int n = 0; n < N; ++n) {
    const Eigen::VectorXcd b = std::conj(e(n)) * g.V1.col(n);
    A.col(n) = J.M_d.col(n);
    A.col(N + n) = j1 * J.M.col(n);
    B.col(n) = b;
    B.col(N + n) = b;
  }
  auto alpha_b = [&](const Eigen::MatrixXcd& Ma, const Eigen::VectorXcd& Ta, int k) {
    const Eigen::VectorXcd w = Ma.row(k).transpose().cwiseProduct(e).conjugate();
    return Eigen::VectorXcd(g.V1 * w + std::conj(Ta(k)) * g.V3.col(k));
  };
  for (int k = 0; k < K; ++k) {
    A(k, 2 * N + k) = 1.0;
    B.col(2 * N + k) = alpha_b(J.M_a, J.T_a, k);
  }
  const Eigen::MatrixXcd C = H * B;
  const Eigen::MatrixXcd Z = W * q_.cast<cplx>().asDiagonal() * W;
  const Eigen::MatrixXcd ZA = Z * A;

  // Indices of the active variables in the full order.
  std::vector<int> idx;
  for (int n = 0; n < N; ++n) idx.push_back(n);
  if (mode_ == SearchMode::NRP)
    for (int n = 0; n < N; ++n) idx.push_back(N + n);
  for (int k = 0; k < K; ++k) idx.push_back(2 * N + k);
  const int d = static_cast<int>(idx.size());

  if (grad) {
    grad->resize(d);
    for (int i = 0; i < d; ++i) {
      const int v = idx[i];
      (*grad)(i) = -2.0 * (C.col(v).adjoint() * ZA.col(v))(0).real() * (1.0 + corruption_);
    }
  }
  if (!hess) return true;

  const Eigen::MatrixXcd WA = W * A, WC = W * C, ZC = Z * C;
  const Eigen::MatrixXcd CWA = C.adjoint() * WA, CZA = C.adjoint() * ZA;
  const Eigen::MatrixXcd CWC = C.adjoint() * WC, AZA = A.adjoint() * ZA;
  const Eigen::MatrixXcd AWA = A.adjoint() * WA, CZC = C.adjoint() * ZC;
  const Eigen::MatrixXcd AWC = A.adjoint() * WC, AZC = A.adjoint() * ZC;
  const Eigen::MatrixXcd BB = B.adjoint() * B;

  Eigen::MatrixXd S(nf, nf);
  for (int x1 = 0; x1 < nf; ++x1) {
    for (int y = 0; y < nf; ++y) {
      const cplx t = CWA(y, x1) * CZA(x1, y) + CWC(y, x1) * AZA(x1, y) +
                     AWA(y, x1) * CZC(x1, y) + AWC(y, x1) * AZC(x1, y);
      S(x1, y) = 2.0 * t.real() - 2.0 * (BB(x1, y) * AZA(y, x1)).real();
    }
  }
  // Second derivatives of H: 2 Re(c^H Z a) for H_xy = a b^H.
  auto second = [&](const Eigen::VectorXcd& c, const Eigen::VectorXcd& a) {
    return 2.0 * (c.adjoint() * Z * a)(0).real();
  };
  for (int n = 0; n < N; ++n) {
    const Eigen::VectorXcd c = C.col(n);
    S(n, n) -= second(c, J.M_dd.col(n));
    const double dp = second(c, j1 * J.M_d.col(n));
    S(n, N + n) -= dp;
    S(N + n, n) -= dp;
    S(N + n, N + n) -= second(c, -J.M.col(n));
    const Eigen::VectorXcd zc = Z.adjoint() * c;  // (c^H Z)^H
    for (int k = 0; k < K; ++k) {
      const double da = 2.0 * (std::conj(zc(k)) * J.M_da(k, n)).real();
      const double pa = 2.0 * (std::conj(zc(k)) * j1 * J.M_a(k, n)).real();
      S(n, 2 * N + k) -= da;
      S(2 * N + k, n) -= da;
      S(N + n, 2 * N + k) -= pa;
      S(2 * N + k, N + n) -= pa;
    }
  }
  for (int k = 0; k < K; ++k) {
    const Eigen::VectorXcd c = H * alpha_b(J.M_aa, J.T_aa, k);
    S(2 * N + k, 2 * N + k) -= 2.0 * (c.adjoint() * Z.col(k))(0).real();
  }

  hess->resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) (*hess)(i, k) = S(idx[i], idx[k]);
  return true;
}

}  // namespace irs
