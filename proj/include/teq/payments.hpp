#pragma once

#include "teq/game.hpp"

namespace teq {

/// Expected first-price payments: p_ij = theta_i * b_ij * prod over higher
/// bidders of (1 - theta_k).
PaymentReport expected_payments_fp(const ThrottlingGame& game,
                                   const ThrottleProfile& theta);

/// Expected second-price payments: the winner pays the bid of the highest
/// participating lower bidder.
PaymentReport expected_payments_sp(const ThrottlingGame& game,
                                   const ThrottleProfile& theta);

PaymentReport expected_payments(const ThrottlingGame& game,
                                const ThrottleProfile& theta,
                                AuctionFormat format);

/// Win probabilities y_ij; identical for both formats. Zero-bid pairs never
/// win.
Allocation expected_allocation(const ThrottlingGame& game,
                               const ThrottleProfile& theta);

/// LW(y) = sum_i min{sum_j b_ij y_ij, B_i}; unbounded budgets contribute the
/// raw bid mass.
double liquid_welfare(const ThrottlingGame& game, const Allocation& alloc);

/// Checks the delta-approximate throttling equilibrium conditions: budgets
/// hold, and a buyer spending below (1-delta)*B_i must have theta_i >=
/// 1-delta. Unbounded budgets always trigger the second condition.
EquilibriumCertificate verify_equilibrium(const ThrottlingGame& game,
                                          const ThrottleProfile& theta,
                                          double delta, AuctionFormat format,
                                          double tolerance = kDefaultTolerance);

/// Same check from precomputed per-buyer spends (used by the grid oracle).
EquilibriumCertificate certify_spends(const ThrottlingGame& game,
                                      const ThrottleProfile& theta,
                                      const std::vector<double>& per_buyer_spend,
                                      double delta, AuctionFormat format,
                                      double tolerance = kDefaultTolerance);

/// Budget feasibility alone: spend_i <= B_i + tolerance for all buyers.
bool is_budget_feasible(const ThrottlingGame& game,
                        const ThrottleProfile& theta, AuctionFormat format,
                        double tolerance = kDefaultTolerance);

void check_profile(const ThrottlingGame& game, const ThrottleProfile& theta);

}  // namespace teq
