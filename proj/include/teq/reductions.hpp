#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "teq/game.hpp"

namespace teq {

/// Directed-graph game: each node's strategy must react to whether its
/// in-neighbours' sum crosses 1/2 (within epsilon). In/out degrees are
/// capped at three.
struct ThresholdGame {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
  double epsilon = 0.5;

  std::vector<std::vector<int>> in_neighbors() const;
  std::vector<std::vector<int>> out_neighbors() const;
  void validate() const;
};

/// Buyer/good index layout of the threshold-game reduction, fixed so that
/// certificates are reproducible: buyers alternate T(0), S(0), T(1), S(1),
/// ...; goods list each node's neighbor goods G(i,j) (j ascending) followed
/// by its reciprocal good R(i).
struct ReductionMapping {
  std::vector<int> threshold_buyer;  // node -> T(i)
  std::vector<int> strategy_buyer;   // node -> S(i)
  std::vector<std::vector<std::pair<int, int>>> neighbor_good;  // (j, G(i,j))
  std::vector<int> reciprocal_good;  // node -> R(i)
  double M = 0.0;
  double delta = 0.0;

  int find_neighbor_good(int i, int j) const;
};

/// delta = min{eps/(3+eps), eps/2, 1/4}; M = 160/delta.
std::pair<double, double> threshold_reduction_constants(double epsilon);

/// Builds the second-price throttling game whose delta-approximate
/// equilibria project to eps-approximate threshold equilibria. Nodes with no
/// out-edges would get a zero reciprocal bid and a zero strategy budget, so
/// they are rejected.
std::pair<ThrottlingGame, ReductionMapping> threshold_to_throttling(
    const ThresholdGame& tg);

/// x_i = min{2(1 - theta_S(i)), 1}.
std::vector<double> extract_threshold_strategy(const ThrottleProfile& theta,
                                               const ReductionMapping& mapping);

struct ThresholdCheck {
  bool ok = true;
  struct Issue {
    int node;
    double in_sum;
    double x;
  };
  std::vector<Issue> issues;
};

/// Per-node membership check of the three-case equilibrium condition.
ThresholdCheck verify_threshold_equilibrium(const ThresholdGame& tg,
                                            const std::vector<double>& x,
                                            double eps);

/// 3-CNF formula; clauses hold signed literals (+v for x_v, -v for !x_v,
/// 1-based magnitudes).
struct CnfFormula {
  int var_count = 0;
  std::vector<std::vector<int>> clauses;

  void validate() const;
};

CnfFormula parse_dimacs(std::istream& in);

/// Buyer/good layout of the revenue-target reduction: buyers V_1^+, V_1^-,
/// ..., V_n^+, V_n^-, then U; goods in blocks A_1..A_n, B_1..B_n, S_1..S_n,
/// T_1..T_n, then C_1..C_m.
struct SatReduction {
  ThrottlingGame game;
  double target_revenue = 0.0;  // R = n + m + 3n/2

  int buyer_pos(int var) const { return 2 * var; }       // V_var^+
  int buyer_neg(int var) const { return 2 * var + 1; }   // V_var^-
  int buyer_u() const { return game.n - 1; }
  int good_a(int var) const { return var; }
  int good_b(int var) const { return n_vars_ + var; }
  int good_s(int var) const { return 2 * n_vars_ + var; }
  int good_t(int var) const { return 3 * n_vars_ + var; }
  int good_c(int clause) const { return 4 * n_vars_ + clause; }

  int n_vars_ = 0;
};

SatReduction sat_to_rev(const CnfFormula& cnf);

/// theta(V_i^+) = 1, theta(V_i^-) = 1/2 when assignment_i is true, swapped
/// otherwise; theta(U) = 1.
ThrottleProfile assignment_to_equilibrium(const CnfFormula& cnf,
                                          const std::vector<bool>& assignment);

}  // namespace teq
