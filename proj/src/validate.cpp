// SPDX-License-Identifier: Apache-2.0
#include "irs/validate.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "irs/assignment.hpp"
#include "irs/finite.hpp"
#include "irs/harness.hpp"
#include "irs/optimize.hpp"
#include "irs/precoding.hpp"

namespace irs {
namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

OracleCheck make(std::string name, double measured, double threshold, std::string detail = {}) {
  OracleCheck c;
  c.name = std::move(name);
  c.measured = measured;
  c.threshold = threshold;
  c.passed = measured <= threshold;
  c.detail = std::move(detail);
  return c;
}

Eigen::MatrixXcd random_complex(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

}  // namespace

RandomInstance random_instance(std::uint64_t seed, int max_users, int max_surfaces) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  ExperimentConfig cfg;
  cfg.K = pick(1, max_users);
  cfg.N = pick(cfg.K, std::max(cfg.K, max_surfaces));
  cfg.M1 = std::max(8, cfg.K);
  cfg.M2 = std::vector<int>{1, 2, 4}[pick(0, 2)];
  cfg.paths = pick(0, 2);
  cfg.wall = pick(0, 1) == 1;
  cfg.sigma_sh_db = 2.0;
  cfg.irs_area_m2 = std::pow(10.0, std::uniform_real_distribution<double>(-4.0, -2.0)(rng));
  const Scene scene = build_scene(cfg);
  const ChannelRealization real = sample_realization(cfg, scene, rng);
  RandomInstance inst{build_links(scene, real), ControlVector::zeros(cfg.N, cfg.K)};
  std::uniform_real_distribution<double> u(-kPi / 2, kPi / 2);
  for (auto& d : inst.xi.delta) d = u(rng);
  for (auto& p : inst.xi.psi) p = u(rng) + kPi / 2;
  for (auto& a : inst.xi.alpha) a = u(rng);
  return inst;
}

DerivativeError derivative_error(const LinkGeometry& links, const ControlVector& xi, bool nrp,
                                 double h, double corruption) {
  Objective obj(links, Eigen::VectorXd::Ones(links.K), nrp ? SearchMode::NRP : SearchMode::NR);
  obj.set_gradient_corruption(corruption);
  Objective clean(links, Eigen::VectorXd::Ones(links.K), nrp ? SearchMode::NRP : SearchMode::NR);
  const Eigen::VectorXd x = obj.pack(xi);
  const int d = obj.dimension();
  Eigen::VectorXd g;
  Eigen::MatrixXd S;
  if (!obj.evaluate(x, nullptr, &g, &S)) throw std::domain_error("singular instance");
  Eigen::VectorXd gfd(d);
  Eigen::MatrixXd Sfd(d, d);
  // Fourth-order central stencil: the sinc lobes of large panels make the
  // O(h^2) term of the two-point rule comparable to the tolerance.
  auto at = [&](int i, double step) {
    Eigen::VectorXd y = x;
    y(i) += step;
    return y;
  };
  for (int i = 0; i < d; ++i) {
    const Eigen::VectorXd p1 = at(i, h), m1 = at(i, -h), p2 = at(i, 2 * h), m2 = at(i, -2 * h);
    gfd(i) = (8 * (clean.value(p1) - clean.value(m1)) - (clean.value(p2) - clean.value(m2))) / (12 * h);
    Sfd.col(i) =
        (8 * (clean.gradient(p1) - clean.gradient(m1)) - (clean.gradient(p2) - clean.gradient(m2))) / (12 * h);
  }
  DerivativeError e;
  e.gradient = (g - gfd).norm() / std::max(gfd.norm(), 1e-300);
  e.hessian = (S - Sfd).norm() / std::max(Sfd.norm(), 1e-300);
  e.symmetry = (S - S.transpose()).norm() / std::max(S.norm(), 1e-300);
  return e;
}

std::vector<OracleCheck> run_validation(const ValidateOptions& opt) {
  std::vector<OracleCheck> out;
  std::mt19937_64 rng(opt.seed);

  {  // steering vectors are unit norm with equal-magnitude entries
    double worst = 0.0;
    std::uniform_real_distribution<double> ang(-kPi / 2, kPi / 2);
    for (int i = 0; i < opt.instances; ++i) {
      const int m = 1 + i % 64;
      const Eigen::VectorXcd s = steering_vector(0.5, m, ang(rng));
      worst = std::max(worst, std::abs(s.norm() - 1.0));
      worst = std::max(worst, (s.cwiseAbs().array() - 1.0 / std::sqrt(double(m))).abs().maxCoeff());
    }
    out.push_back(make("steering_unit_norm", worst, 1e-12));
  }

  {  // finite channel: explicit per-meta-atom matrices against the closed form
    double worst = 0.0;
    for (int i = 0; i < opt.instances; ++i) {
      const RandomInstance inst = random_instance(opt.seed * 7919 + i, 2, 3);
      const int L = 1 + i % 16;
      const std::vector<int> sides(inst.links.N, L);
      for (int k = 0; k < inst.links.K; ++k) {
        const Eigen::RowVectorXcd a = finite_row_closed(inst.links, inst.xi, k, sides);
        const Eigen::RowVectorXcd b = finite_row_explicit(inst.links, inst.xi, k, sides);
        worst = std::max(worst, (a - b).norm() / std::max(a.norm(), 1e-300));
      }
    }
    out.push_back(make("finite_explicit_vs_closed", worst, 1e-10));
  }

  {  // asymptotic limit: finite rows approach the large-panel rows as L doubles
    ExperimentConfig cfg;
    cfg.K = cfg.N = 4;
    cfg.M1 = 32;
    cfg.M2 = 4;
    cfg.irs_area_m2 = 1e-2;
    cfg.paths = 2;
    cfg.sigma_sh_db = 2.0;
    const Scene scene = build_scene(cfg);
    std::mt19937_64 r2(opt.seed);
    const ChannelRealization real = sample_realization(cfg, scene, r2);
    const LinkGeometry links = build_links(scene, real);
    const ControlVector xi = hop(links, cfg.q_vector()).xi;
    const Eigen::MatrixXcd Hinf = asymptotic_channel(links, xi).H();
    // Worst error over the sub-0.1-wavelength pitches of an L-doubling schedule.
    double prev = 1e300, worst_fine = 0.0;
    bool monotone = true;
    const double ap = links.aperture[0];
    int L = std::max(1, static_cast<int>(std::ceil(ap / 0.8)));
    std::string trace;
    for (; ap / L > 0.1 / 4; L *= 2) {
      Eigen::MatrixXcd HL(links.K, links.M1);
      for (int k = 0; k < links.K; ++k)
        HL.row(k) = finite_row_closed(links, xi, k, std::vector<int>(links.N, L));
      const double err = (HL - Hinf).norm() / Hinf.norm();
      monotone = monotone && err < prev;
      prev = err;
      if (ap / L <= 0.1) worst_fine = std::max(worst_fine, err);
      trace += " L=" + std::to_string(L) + ":" + fmt(err);
    }
    OracleCheck c = make("finite_to_asymptotic", worst_fine, 1e-2, "relative error" + trace);
    c.passed = c.passed && monotone;
    out.push_back(c);
  }

  {  // analytic derivatives against central differences
    double worst_g = 0.0, worst_h = 0.0;
    int used = 0;
    for (int i = 0; used < opt.instances && i < 10 * opt.instances; ++i) {
      const RandomInstance inst = random_instance(opt.seed * 104729 + i);
      try {
        const DerivativeError e = derivative_error(inst.links, inst.xi, i % 2 == 0, 1e-5,
                                                   opt.corrupt_gradient ? 1e-3 : 0.0);
        worst_g = std::max(worst_g, e.gradient);
        worst_h = std::max(worst_h, e.hessian);
        ++used;
      } catch (const std::domain_error&) {
      }
    }
    out.push_back(make("gradient_vs_finite_difference", worst_g, 1e-5,
                       std::to_string(used) + " points"));
    out.push_back(make("hessian_vs_finite_difference", worst_h, 1e-3,
                       std::to_string(used) + " points"));
  }

  {  // Hungarian against exhaustive enumeration
    int mismatches = 0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < opt.instances; ++i) {
      const int K = 1 + i % 4, N = K + (i / 4) % (7 - K);
      Eigen::MatrixXd w(K, N);
      for (int r = 0; r < K; ++r)
        for (int c = 0; c < N; ++c) w(r, c) = u(rng);
      const double hc = assignment_cost(w, hungarian(w));
      double best = 1e300;
      for_each_map(K, N, [&](const AssignmentMap& m) { best = std::min(best, assignment_cost(w, m)); });
      if (std::abs(hc - best) > 1e-12 * std::max(1.0, best)) ++mismatches;
    }
    out.push_back(make("hungarian_vs_exhaustive", mismatches, 0));
  }

  {  // two-user assignment optimality on a grid
    int failures = 0, tested = 0;
    std::uniform_real_distribution<double> u(0.1, 2.0);
    while (tested < opt.instances) {
      Eigen::Matrix2d mu;
      mu << u(rng), u(rng), u(rng), u(rng);
      const PairAssignmentResult r = pair_assignment_oracle(mu, 512);
      if (!r.conclusive) continue;
      ++tested;
      if (!r.at_corner || r.grid_identity != r.rule_identity) ++failures;
    }
    out.push_back(make("two_user_assignment_corner", failures, 0));
  }

  {  // zero-forcing identity and power constraint
    double worst = 0.0;
    std::uniform_int_distribution<int> kk(1, 4);
    int tested = 0;
    while (tested < 10 * opt.instances) {
      const int K = kk(rng), M1 = K + kk(rng);
      const Eigen::MatrixXcd H = random_complex(rng, K, M1);
      if (gram_condition(H) > 1e6) continue;
      ++tested;
      Eigen::VectorXd q = Eigen::VectorXd::Ones(K) + Eigen::VectorXd::Random(K).cwiseAbs();
      const Precoder p = zf_precoder(H, q, 1.0);
      const Eigen::MatrixXcd target = p.scale * q.cwiseSqrt().cast<cplx>().asDiagonal().toDenseMatrix();
      worst = std::max(worst, (H * p.gamma - target).norm() / target.norm());
      worst = std::max(worst, std::abs(p.gamma.squaredNorm() - 1.0));
    }
    out.push_back(make("zero_forcing_identity", worst, 1e-9, std::to_string(tested) + " channels"));
  }

  {  // fine phase quantization reproduces the continuous profile
    ExperimentConfig cfg;
    cfg.K = cfg.N = 2;
    cfg.M1 = 8;
    cfg.M2 = 4;
    cfg.trials = 3;
    cfg.seed = opt.seed;
    cfg.finite_evaluation = true;
    const auto cont = run_experiment(cfg);
    cfg.quant_bits = 16;
    const auto fine = run_experiment(cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < cont.size(); ++i)
      for (std::size_t k = 0; k < cont[i].snr_db.size(); ++k)
        worst = std::max(worst, std::abs(cont[i].snr_db[k] - fine[i].snr_db[k]));
    out.push_back(make("fine_quantization_db", worst, 0.01));
  }
  return out;
}

}  // namespace irs
