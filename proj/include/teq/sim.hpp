#pragma once

#include <cstdint>

#include "teq/game.hpp"
#include "teq/trace.hpp"

namespace teq {

/// One participation coin per buyer per round; the good type is sampled per
/// round, so across-goods correlation is vacuous. Fixed for reproducibility.
enum class Correlation { PerRound };

struct SimConfig {
  long long rounds = 1000000;
  std::uint64_t seed = 0;
  AuctionFormat format = AuctionFormat::FirstPrice;
  Correlation correlation = Correlation::PerRound;

  void validate() const;
};

struct SimReport {
  std::vector<double> empirical_payments;  // n x m per-round averages
  std::vector<double> standard_error;      // n x m
  double empirical_revenue = 0.0;          // sum of empirical_payments

  double pay(int i, int j, int m) const {
    return empirical_payments[static_cast<size_t>(i) * m + j];
  }
  double se(int i, int j, int m) const {
    return standard_error[static_cast<size_t>(i) * m + j];
  }
};

/// Monte-Carlo estimator of expected payments. Each round draws a good type
/// from d, flips one coin per buyer, runs the auction among participants with
/// positive raw bids (index tie-breaking), and attributes the winner's raw
/// payment to (winner, good). Averages converge to p(theta)_ij in the
/// rescaled game. Deterministic per seed: the generator is mt19937_64 and
/// uniform doubles are derived as (x >> 11) * 2^-53, so streams are
/// reproducible across platforms.
SimReport simulate(const RawMarket& market, const ThrottleProfile& theta,
                   const SimConfig& config);

struct DynamicsResult {
  DynamicsTrace trace;
  EquilibriumCertificate certificate;  // analytic check at level 2*delta
};

/// Empirical-spend variant of the first-price tatonnement: buyers apply the
/// multiplicative update using epoch-averaged spend instead of analytic
/// spend. Budgets are per-auction, matching the rescaled game.
DynamicsResult simulate_dynamics(const RawMarket& market,
                                 const std::vector<Budget>& budgets,
                                 double delta, long long epoch_len,
                                 const SimConfig& config);

}  // namespace teq
