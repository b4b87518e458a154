// SPDX-License-Identifier: Apache-2.0
//
// UE-to-IRS assignment heuristic (HOP): each UE is served by one IRS, chosen
// by a min-cost assignment on the large-array limit of the objective.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

#include "irs/channel.hpp"

namespace irs {

/// map[k] is the IRS serving UE k; injective.
using AssignmentMap = std::vector<int>;

class NoFeasibleAssignment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pointing angles that align IRS n with UE k's LoS path: (delta_n, alpha_k).
std::pair<double, double> aligned_angles(const LinkGeometry& links, int k, int n);

/// w(k, n) = q_k / (|M_kn|^2 + |T_k|^2) with M_kn and T_k evaluated at the
/// aligned angles, multipath included. +inf for a zero channel.
Eigen::MatrixXd hop_weights(const LinkGeometry& links, const Eigen::VectorXd& q);

/// Minimum-cost injective assignment of rows to columns (rows <= columns).
AssignmentMap hungarian(const Eigen::MatrixXd& weights);
double assignment_cost(const Eigen::MatrixXd& weights, const AssignmentMap& map);

/// Points IRS map[k] at UE k and UE k at it; IRS phases align the IRS path
/// with the wall path at the UE. Unassigned IRSs get delta = psi = 0.
ControlVector hop_configure(const AssignmentMap& map, const LinkGeometry& links);

struct HopResult {
  AssignmentMap map;
  ControlVector xi;
  Eigen::MatrixXd weights;
};
HopResult hop(const LinkGeometry& links, const Eigen::VectorXd& q);

/// Number of injective maps N! / (N-K)!, saturating at `cap` + 1.
double count_maps(int users, int surfaces, double cap = 1e18);

/// Calls `visit` with every injective map of K users onto N surfaces.
void for_each_map(int users, int surfaces, const std::function<void(const AssignmentMap&)>& visit);

inline constexpr double kMapSearchBudget = 1e6;

struct MapSearchResult {
  AssignmentMap map;
  double f = 0.0;  // full objective at hop_configure(map)
  int evaluated = 0;
};
/// Exhaustive search of the full objective over all maps.
/// Throws std::length_error beyond kMapSearchBudget maps.
MapSearchResult exhaustive_map_search(const LinkGeometry& links, const Eigen::VectorXd& q);

struct PairAssignmentResult {
  bool conclusive = false;    // the matrix satisfies the dominance hypothesis
  bool rule_identity = false; // 1/mu11^2 + 1/mu22^2 < 1/mu12^2 + 1/mu21^2
  bool grid_identity = false; // grid maximum found at (0, pi/2)
  bool at_corner = false;     // grid maximum is one of the two assignment corners
  double f_max = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
};

/// Two-user, two-IRS objective with unit gamma:
/// (m11 m22 c1 s2 - m12 m21 s1 c2)^2 / (m11^2 c1^2 + m21^2 s1^2 + m12^2 c2^2 + m22^2 s2^2).
double pair_objective(const Eigen::Matrix2d& mu, double phi1, double phi2);

/// Grid maximization over [0, pi/2]^2 with `grid` points per axis.
PairAssignmentResult pair_assignment_oracle(const Eigen::Matrix2d& mu, int grid = 512);

}  // namespace irs
