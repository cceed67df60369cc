#pragma once

#include <utility>

#include "teq/game.hpp"
#include "teq/trace.hpp"

namespace teq {

/// Pacing parameters plus the (possibly fractional) supporting allocation.
struct PacingProfile {
  std::vector<double> alpha;
  Allocation allocation;
};

/// Multiplicative tatonnement for the first-price throttling equilibrium.
/// Starts from theta_i = min{B_i/(2 sum_j b_ij), 1} and multiplies theta_i by
/// 1/(1-delta) each round for every buyer with theta_i < 1-delta and spend
/// below (1-delta)B_i. Buyers with no positive bid are pinned to theta = 1.
/// Terminates within n*log(1/c)/delta rounds.
std::pair<ThrottleProfile, DynamicsTrace> solve_fp_throttling(
    const ThrottlingGame& game, double delta, bool record_trace = true);

/// First-price pacing: iterated best responses from alpha = 1 downward.
/// Each response picks the largest alpha_i keeping buyer i within budget,
/// splitting a good fractionally when the budget binds exactly at a paced-bid
/// tie. Converges monotonically to the maximal pacing equilibrium; delta only
/// sets the acceptance level the result is checked against.
PacingProfile solve_fp_pacing(const ThrottlingGame& game, double delta);

/// Checks pacing-equilibrium conditions: winners have the priority-maximal
/// paced bid, positive-bid goods are fully allocated, budgets hold at price
/// p_j(alpha), and spend below (1-delta)B_i forces alpha_i >= 1-delta.
EquilibriumCertificate verify_pacing_equilibrium(
    const ThrottlingGame& game, const PacingProfile& pacing, double delta,
    AuctionFormat format, double tolerance = kDefaultTolerance);

/// Per-good prices under pacing: highest (first-price) or second-highest
/// (second-price) paced bid among positive bids.
std::vector<double> pacing_prices(const ThrottlingGame& game,
                                  const std::vector<double>& alpha,
                                  AuctionFormat format);

/// min_i min{B_i/(2 sum_j b_ij), 1}, the initialization floor; buyers with
/// unbounded budgets or no positive bids contribute 1.
double initialization_floor(const ThrottlingGame& game);

}  // namespace teq
