// SPDX-License-Identifier: Apache-2.0
#include "irs/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "irs/optimize.hpp"

namespace irs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::pair<double, double> aligned_angles(const LinkGeometry& g, int k, int n) {
  const auto& los = g.ray(k, n, 0);
  return {0.5 * (g.phi1[n] - los.phi2), std::asin(std::sin(los.zeta))};
}

Eigen::MatrixXd hop_weights(const LinkGeometry& g, const Eigen::VectorXd& q) {
  if (q.size() != g.K) throw std::invalid_argument("Q must have K entries");
  Eigen::MatrixXd w(g.K, g.N);
  for (int k = 0; k < g.K; ++k) {
    for (int n = 0; n < g.N; ++n) {
      const auto [delta, alpha] = aligned_angles(g, k, n);
      const double p = std::norm(irs_entry(g, k, n, delta, alpha)) + std::norm(wall_entry(g, k, alpha));
      w(k, n) = p > 0 ? q(k) / p : kInf;
    }
  }
  return w;
}

AssignmentMap hungarian(const Eigen::MatrixXd& weights) {
  const int n = static_cast<int>(weights.rows());
  const int m = static_cast<int>(weights.cols());
  if (n == 0) return {};
  if (n > m) throw NoFeasibleAssignment("more users than surfaces");

  // Infinite entries become a finite penalty larger than any feasible total.
  double finite_sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      if (std::isnan(weights(i, j))) throw std::invalid_argument("NaN assignment weight");
      if (std::isfinite(weights(i, j))) finite_sum += std::abs(weights(i, j));
    }
  const double big = 2.0 * finite_sum + 1.0;
  auto a = [&](int i, int j) {
    const double w = weights(i - 1, j - 1);
    return std::isfinite(w) ? w : big;
  };

  // Shortest augmenting paths with row/column potentials, O(n^2 m).
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  AssignmentMap map(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) map[p[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(weights(i, map[i])))
      throw NoFeasibleAssignment("no assignment with finite weights exists");
  return map;
}

double assignment_cost(const Eigen::MatrixXd& weights, const AssignmentMap& map) {
  double c = 0.0;
  for (std::size_t k = 0; k < map.size(); ++k) c += weights(static_cast<Eigen::Index>(k), map[k]);
  return c;
}

ControlVector hop_configure(const AssignmentMap& map, const LinkGeometry& g) {
  if (static_cast<int>(map.size()) != g.K) throw std::invalid_argument("map must have K entries");
  std::vector<char> taken(g.N, 0);
  for (int n : map) {
    if (n < 0 || n >= g.N || taken[n]) throw std::invalid_argument("map must be injective into IRSs");
    taken[n] = 1;
  }
  ControlVector xi = ControlVector::zeros(g.N, g.K);
  for (int k = 0; k < g.K; ++k) {
    const auto [delta, alpha] = aligned_angles(g, k, map[k]);
    xi.delta(map[k]) = delta;
    xi.alpha(k) = alpha;
  }
  for (int k = 0; k < g.K; ++k) {
    const int n = map[k];
    const cplx t = wall_entry(g, k, xi.alpha(k));
    const cplx m = irs_entry(g, k, n, xi.delta(n), xi.alpha(k));
    if (t != cplx{} && m != cplx{}) {
      const double psi = std::arg(t) - std::arg(m);
      xi.psi(n) = psi - 2.0 * kPi * std::floor(psi / (2.0 * kPi));
    }
  }
  return xi;
}

HopResult hop(const LinkGeometry& g, const Eigen::VectorXd& q) {
  HopResult r;
  r.weights = hop_weights(g, q);
  r.map = hungarian(r.weights);
  r.xi = hop_configure(r.map, g);
  return r;
}

double count_maps(int users, int surfaces, double cap) {
  if (users > surfaces) return 0.0;
  double c = 1.0;
  for (int i = 0; i < users; ++i) {
    c *= surfaces - i;
    if (c > cap) return cap + 1.0;
  }
  return c;
}

void for_each_map(int users, int surfaces, const std::function<void(const AssignmentMap&)>& visit) {
  if (users > surfaces) return;
  AssignmentMap map(users, -1);
  std::vector<char> used(surfaces, 0);
  std::function<void(int)> rec = [&](int k) {
    if (k == users) {
      visit(map);
      return;
    }
    for (int n = 0; n < surfaces; ++n) {
      if (used[n]) continue;
      used[n] = 1;
      map[k] = n;
      rec(k + 1);
      used[n] = 0;
    }
  };
  rec(0);
}

MapSearchResult exhaustive_map_search(const LinkGeometry& g, const Eigen::VectorXd& q) {
  const double count = count_maps(g.K, g.N, kMapSearchBudget);
  if (count > kMapSearchBudget)
    throw std::length_error("exhaustive map search exceeds the budget of 1e6 maps");
  if (count == 0) throw NoFeasibleAssignment("more users than surfaces");
  const Objective obj(g, q, SearchMode::NRP);
  MapSearchResult best;
  best.f = kInf;
  for_each_map(g.K, g.N, [&](const AssignmentMap& map) {
    const double f = obj.value(hop_configure(map, g));
    ++best.evaluated;
    if (f < best.f) {
      best.f = f;
      best.map = map;
    }
  });
  if (best.map.empty() && g.K > 0) throw NoFeasibleAssignment("every map gives a singular channel");
  return best;
}

double pair_objective(const Eigen::Matrix2d& mu, double phi1, double phi2) {
  const double c1 = std::cos(phi1), s1 = std::sin(phi1);
  const double c2 = std::cos(phi2), s2 = std::sin(phi2);
  const double num = mu(0, 0) * mu(1, 1) * c1 * s2 - mu(0, 1) * mu(1, 0) * s1 * c2;
  const double den = mu(0, 0) * mu(0, 0) * c1 * c1 + mu(1, 0) * mu(1, 0) * s1 * s1 +
                     mu(0, 1) * mu(0, 1) * c2 * c2 + mu(1, 1) * mu(1, 1) * s2 * s2;
  return num * num / den;
}

PairAssignmentResult pair_assignment_oracle(const Eigen::Matrix2d& mu, int grid) {
  if (grid < 2) throw std::invalid_argument("grid needs at least two points per axis");
  if ((mu.array() <= 0).any()) throw std::invalid_argument("mu must be positive");
  PairAssignmentResult r;
  const bool forward = mu(0, 0) > mu(1, 0) && mu(1, 1) > mu(0, 1);
  const bool reverse = mu(0, 0) < mu(1, 0) && mu(1, 1) < mu(0, 1);
  r.conclusive = forward || reverse;
  const auto inv2 = [](double x) { return 1.0 / (x * x); };
  r.rule_identity = inv2(mu(0, 0)) + inv2(mu(1, 1)) < inv2(mu(0, 1)) + inv2(mu(1, 0));

  const double h = 0.5 * kPi / (grid - 1);
  double best = -1.0;
  int bi = 0, bj = 0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double f = pair_objective(mu, i * h, j * h);
      if (f > best) {
        best = f;
        bi = i;
        bj = j;
      }
    }
  r.f_max = best;
  r.phi1 = bi * h;
  r.phi2 = bj * h;
  const double f_id = pair_objective(mu, 0.0, 0.5 * kPi);
  const double f_sw = pair_objective(mu, 0.5 * kPi, 0.0);
  const double tol = 1e-12 * best;
  r.at_corner = std::max(f_id, f_sw) >= best - tol;
  r.grid_identity = r.at_corner && f_id >= f_sw;
  return r;
}

}  // namespace irs
