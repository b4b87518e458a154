// SPDX-License-Identifier: Apache-2.0
//
// Built-in numerical oracles: each compares a production code path against
// an independent reference computation.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "irs/channel.hpp"

namespace irs {

struct OracleCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;   // worst error or mismatch count
  double threshold = 0.0;
  std::string detail;
};

struct ValidateOptions {
  std::uint64_t seed = 1;
  int instances = 100;
  bool corrupt_gradient = false;  // negative control for the derivative oracle
};

/// Random small scene (N, K <= 4, P <= 2, optional wall) with a random control vector.
struct RandomInstance {
  LinkGeometry links;
  ControlVector xi;
};
RandomInstance random_instance(std::uint64_t seed, int max_users = 4, int max_surfaces = 4);

/// Relative errors of the analytic gradient and Hessian against central
/// differences with step h.
struct DerivativeError {
  double gradient = 0.0;
  double hessian = 0.0;
  double symmetry = 0.0;
};
DerivativeError derivative_error(const LinkGeometry& links, const ControlVector& xi, bool nrp,
                                 double h = 1e-5, double corruption = 0.0);

std::vector<OracleCheck> run_validation(const ValidateOptions& opt);

}  // namespace irs
