// SPDX-License-Identifier: Apache-2.0
//
// SNR maximization over the control vector xi = [delta; psi; alpha] by
// minimizing f(xi) = Tr{(HH^H)^-1 Q}, with analytic gradient and Hessian and a
// safeguarded Newton iteration run from many starting points.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "irs/channel.hpp"

namespace irs {

/// NRP optimizes all of xi; NR freezes psi = 0 and drops it from the search space.
enum class SearchMode { NR, NRP };

class Objective {
 public:
  Objective(LinkGeometry links, Eigen::VectorXd q, SearchMode mode = SearchMode::NRP,
            double transmit_power_w = 1.0, double noise_power_w = 1.0);

  SearchMode mode() const { return mode_; }
  int dimension() const;
  const LinkGeometry& links() const { return links_; }
  const Eigen::VectorXd& q() const { return q_; }

  Eigen::VectorXd pack(const ControlVector& xi) const;
  ControlVector unpack(const Eigen::VectorXd& x) const;

  /// +inf when HH^H is singular.
  double value(const Eigen::VectorXd& x) const;
  double value(const ControlVector& xi) const { return value(pack(xi)); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

  /// Any of the outputs may be null. Returns false when f is not finite.
  bool evaluate(const Eigen::VectorXd& x, double* f, Eigen::VectorXd* grad,
                Eigen::MatrixXd* hess) const;

  /// Per-UE SNR in dB at the given objective value.
  Eigen::VectorXd snr_db(double f) const;

  /// Maps x to its canonical representative: delta into [-pi/2, pi/2),
  /// alpha into [-pi/2, pi/2], psi into [0, 2 pi). f is invariant under it.
  void canonicalize(Eigen::VectorXd& x) const;

  /// Test hook: scales every returned gradient by (1 + factor).
  void set_gradient_corruption(double factor) { corruption_ = factor; }

 private:
  LinkGeometry links_;
  Eigen::VectorXd q_;
  SearchMode mode_;
  double pt_;
  double noise_;
  double corruption_ = 0.0;
};

/// Canonical form of every block of a full control vector.
ControlVector canonical(ControlVector xi);

struct NewtonOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-8;  // infinity norm, radians
  bool pure = false;             // undamped iteration, may increase f
  double initial_damping = 1e-6; // relative to the largest Hessian diagonal entry
  double max_damping = 1e12;
  bool record_trace = false;
};

struct TracePoint {
  int iteration = 0;
  double f = 0.0;
  double step_norm = 0.0;
};

struct StepResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double step_norm = 0.0;
  bool accepted = false;  // false when no step reduced f
  bool damped = false;    // Levenberg damping was needed
};

/// One safeguarded Newton step. Accepted steps never increase f unless
/// `pure` is set.
StepResult newton_step(const Objective& obj, const Eigen::VectorXd& x, const NewtonOptions& opt);

struct NewtonResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  bool damped = false;
  std::vector<TracePoint> trace;
};

NewtonResult run_newton(const Objective& obj, Eigen::VectorXd x0, const NewtonOptions& opt);

struct MultistartOptions {
  int starts = 100;
  std::uint64_t seed = 1;
  NewtonOptions newton;
  int threads = 1;
};

struct OptimResult {
  ControlVector xi;
  double f = 0.0;
  Eigen::VectorXd snr_db;
  int iterations = 0;  // summed over starts
  int starts = 0;      // starts that produced a finite objective
  int best_start = -1; // -1 is the extra start
  bool converged = false;
  double seconds = 0.0;
  std::vector<std::vector<TracePoint>> traces;  // per start when tracing
};

/// Best local minimum over `starts` uniform random starts in [0, 2 pi)^d,
/// plus `extra_start` if given. Start i draws from an RNG keyed by (seed, i),
/// so results do not depend on the thread count.
OptimResult multistart(const Objective& obj, const MultistartOptions& opt,
                       const std::optional<ControlVector>& extra_start = std::nullopt);

}  // namespace irs
