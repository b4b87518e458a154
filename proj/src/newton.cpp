// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <chrono>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "irs/optimize.hpp"

namespace irs {
namespace {

struct Trial {
  Eigen::VectorXd x;
  double f;
  double step_norm;
};

Trial try_step(const Objective& obj, const Eigen::VectorXd& x, const Eigen::VectorXd& step) {
  Eigen::VectorXd y = x + step;
  obj.canonicalize(y);
  return {y, obj.value(y), step.lpNorm<Eigen::Infinity>()};
}

}  // namespace

StepResult newton_step(const Objective& obj, const Eigen::VectorXd& x, const NewtonOptions& opt) {
  double f = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd S;
  if (!obj.evaluate(x, &f, &g, &S)) throw std::domain_error("Newton step from a singular point");
  StepResult r{x, f, 0.0, true, false};
  if (g.lpNorm<Eigen::Infinity>() == 0.0) return r;

  const Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (opt.pure) {
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    if (lu.isInvertible()) {
      const Trial t = try_step(obj, x, -lu.solve(g));
      return {t.x, t.f, t.step_norm, true, false};
    }
  } else if (llt.info() == Eigen::Success) {
    const Trial t = try_step(obj, x, -llt.solve(g));
    if (t.f <= f) return {t.x, t.f, t.step_norm, true, false};
  }

  // Levenberg damping: S + lambda I, doubling lambda until f does not increase.
  const double scale = std::max(1.0, S.diagonal().cwiseAbs().maxCoeff());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(S.rows(), S.cols());
  for (double lambda = opt.initial_damping * scale; lambda <= opt.max_damping * scale;
       lambda *= 2.0) {
    const Eigen::LLT<Eigen::MatrixXd> damped(S + lambda * I);
    if (damped.info() != Eigen::Success) continue;
    const Trial t = try_step(obj, x, -damped.solve(g));
    if (t.f <= f) return {t.x, t.f, t.step_norm, true, true};
  }
  r.accepted = false;
  r.damped = true;
  return r;
}

NewtonResult run_newton(const Objective& obj, Eigen::VectorXd x0, const NewtonOptions& opt) {
  obj.canonicalize(x0);
  NewtonResult res;
  res.x = x0;
  res.f = obj.value(x0);
  if (!std::isfinite(res.f)) return res;
  if (opt.record_trace) res.trace.push_back({0, res.f, 0.0});
  for (int it = 1; it <= opt.max_iterations; ++it) {
    StepResult s;
    try {
      s = newton_step(obj, res.x, opt);
    } catch (const std::domain_error&) {
      break;  // pure iteration landed on a singular point
    }
    res.iterations = it;
    res.damped = res.damped || s.damped;
    if (!s.accepted) {
      res.converged = true;  // no descent direction left at working precision
      break;
    }
    res.x = s.x;
    res.f = s.f;
    if (opt.record_trace) res.trace.push_back({it, s.f, s.step_norm});
    if (!std::isfinite(res.f)) break;
    if (s.step_norm < opt.step_tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

OptimResult multistart(const Objective& obj, const MultistartOptions& opt,
                       const std::optional<ControlVector>& extra_start) {
  if (opt.starts < 0 || (opt.starts == 0 && !extra_start))
    throw std::invalid_argument("multistart needs at least one start");
  const auto t0 = std::chrono::steady_clock::now();
  const int dim = obj.dimension();
  const int total = opt.starts + (extra_start ? 1 : 0);
  std::vector<NewtonResult> runs(total);

  auto run_one = [&](int i) {
    Eigen::VectorXd x0(dim);
    if (i < opt.starts) {
      std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                        static_cast<std::uint32_t>(i), 0x5eedu};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
      for (int d = 0; d < dim; ++d) x0(d) = u(rng);
    } else {
      ControlVector xi = *extra_start;
      if (obj.mode() == SearchMode::NR) xi.psi.setZero();
      x0 = obj.pack(xi);
    }
    runs[i] = run_newton(obj, x0, opt.newton);
  };

  const int threads = std::max(1, std::min(opt.threads, total));
  if (threads == 1) {
    for (int i = 0; i < total; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (int i = t; i < total; i += threads) run_one(i);
      });
    for (auto& th : pool) th.join();
  }

  OptimResult out;
  out.f = std::numeric_limits<double>::infinity();
  for (int i = 0; i < total; ++i) {
    const NewtonResult& r = runs[i];
    out.iterations += r.iterations;
    if (!std::isfinite(r.f)) continue;
    ++out.starts;
    if (r.f < out.f) {
      out.f = r.f;
      out.xi = obj.unpack(r.x);
      out.converged = r.converged;
      out.best_start = i < opt.starts ? i : -1;
    }
    if (opt.newton.record_trace) out.traces.push_back(r.trace);
  }
  if (out.starts == 0) throw std::runtime_error("all multistart runs were infeasible");
  out.snr_db = obj.snr_db(out.f);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace irs
