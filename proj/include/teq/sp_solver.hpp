#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "teq/game.hpp"
#include "teq/trace.hpp"

namespace teq {

struct FixedPointConfig {
  double delta = 0.01;       // target approximation level, in (0, 1/2)
  int max_iterations = 50000;
  double damping = 0.5;      // in (0, 1]
  int restart_seeds = 8;
  std::uint64_t seed = 1;

  void validate() const;
};

struct GridOracleConfig {
  double step = 1.0 / 16.0;  // grid spacing, must divide 1
  double delta = 0.05;
  std::int64_t max_points = 200000000;

  void validate() const;
};

/// Two-bids-per-good second-price tatonnement. Each round first raises every
/// buyer with theta_i < 1-gamma and spend below (1-gamma)^2 B_i by 1/(1-gamma),
/// then shaves overspending buyers by 1-gamma. Returns a 3*gamma-approximate
/// equilibrium. Goods with a single positive bid are fine (they never produce
/// a payment); three or more positive bids on a good are rejected.
std::pair<ThrottleProfile, DynamicsTrace> solve_sp_two_bid(
    const ThrottlingGame& game, double gamma, bool record_trace = true);

/// Closed-form second-price payment on a <=2-positive-bid good:
/// theta_i * theta_k * b_kj when i holds the priority-higher positive bid
/// against k, else 0.
double sp_payment_two_bid(const ThrottlingGame& game,
                          const ThrottleProfile& theta, int i, int j);

/// One application of the Brouwer map whose fixed points are second-price
/// throttling equilibria. delta = 0 selects f_i = min{B_i / sum_j
/// p(1,theta_-i)_ij, 1} (1 on a zero denominator); delta > 0 selects the
/// clamped variant f_i = min{(1-delta/2)B_i / max{sum_j p(1,theta_-i)_ij,
/// B_i/2}, 1}. Unbounded budgets always map to 1.
ThrottleProfile sp_fixed_point_map(const ThrottlingGame& game,
                                   const ThrottleProfile& theta, double delta);

struct FixedPointResult {
  std::optional<ThrottleProfile> profile;  // empty = NotConverged
  int iterations = 0;
  int seeds_tried = 0;
};

/// Damped iteration theta <- (1-damping)*theta + damping*f(theta) of the
/// clamped map, restarting from random seeds. A result is returned only if
/// it passes verify_equilibrium at config.delta; otherwise NotConverged.
/// No convergence guarantee is claimed in general.
FixedPointResult solve_sp_fixed_point(const ThrottlingGame& game,
                                      const FixedPointConfig& config);

/// Exhaustive grid search: all profiles on the step-lattice accepted by
/// verify_equilibrium at config.delta, in lexicographic order. Lattice values
/// that can never pass for a buyer (unbounded budget below 1-delta) are
/// pruned up front.
std::vector<ThrottleProfile> brute_force_equilibria(
    const ThrottlingGame& game, const GridOracleConfig& config,
    AuctionFormat format, double tolerance = kDefaultTolerance);

/// Lipschitz constant of the clamped Brouwer map: 2*m*n*Bmax*Bmin^-2*bmax,
/// where Bmax/Bmin range over the finite budgets (the clamp keeps the
/// denominator above Bmin/2, which is what makes Bmin the relevant floor).
/// Requires at least one finite budget.
double lipschitz_bound(const ThrottlingGame& game);

}  // namespace teq
