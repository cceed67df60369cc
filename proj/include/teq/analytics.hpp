#pragma once

#include "teq/fp_solver.hpp"
#include "teq/game.hpp"

namespace teq {

struct ComparisonReport {
  double rev_te = 0.0;
  double rev_pe = 0.0;
  double ratio_te_over_pe = 0.0;
  double ratio_pe_over_te = 0.0;
  ThrottleProfile throttling;
  PacingProfile pacing;
};

struct WelfareReport {
  double equilibrium_lw = 0.0;
  double optimal_lw = 0.0;
  double poa_ratio = 0.0;  // +inf when equilibrium_lw is 0 and optimum > 0
  Allocation witness_allocation;
  bool is_equilibrium = false;  // verified at delta = 0 (within tolerance)
  bool ratio_infinite = false;
};

/// sup_y LW(y) as an LP: maximize sum_i w_i subject to w_i <= B_i (finite
/// budgets only), w_i <= sum_j b_ij y_ij, sum_i y_ij <= 1, y >= 0. Solved
/// with an exact rational simplex (Bland's rule), so the optimum is a
/// certificate, not an approximation.
std::pair<double, Allocation> optimal_liquid_welfare(const ThrottlingGame& game);

WelfareReport poa_ratio(const ThrottlingGame& game, const ThrottleProfile& theta,
                        AuctionFormat format,
                        double tolerance = kDefaultTolerance);

/// Solves both first-price equilibria (throttling via tatonnement, pacing via
/// best response) and compares revenues. Both ratios are at most 2 up to
/// solver slack.
ComparisonReport revenue_comparison_fp(const ThrottlingGame& game, double delta);

/// Second-price tightness family: m diagonal bidders with unbounded budgets
/// plus a big buyer bidding m everywhere with budget m + eps. The unique
/// equilibrium is all-ones with liquid welfare m + eps, while the optimum is
/// 2m - 1 (integral) and slightly more fractionally.
ThrottlingGame poa_example_sp(int m, double eps);

/// First-price tightness family: buyers i <= m bid 1 on good i and m on good
/// m+1 with budget 1; buyer m+1 bids m on good m+1 with unbounded budget.
ThrottlingGame poa_example_fp(int m);

}  // namespace teq
