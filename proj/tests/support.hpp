#pragma once

// Shared oracles for the test binaries. Everything here is deliberately
// independent of the library's payment kernels: expectations are computed by
// enumerating all 2^n participation outcomes.

#include <cmath>
#include <random>
#include <vector>

#include "teq/game.hpp"

namespace teq::testing {

inline double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Expected payments by brute force over all participation subsets.
inline std::vector<double> brute_force_payments(const ThrottlingGame& g,
                                                const ThrottleProfile& theta,
                                                AuctionFormat format) {
  std::vector<double> out(static_cast<size_t>(g.n) * g.m, 0.0);
  for (unsigned mask = 0; mask < (1u << g.n); ++mask) {
    double prob = 1.0;
    for (int i = 0; i < g.n; ++i)
      prob *= (mask >> i) & 1 ? theta[static_cast<size_t>(i)]
                              : 1.0 - theta[static_cast<size_t>(i)];
    if (prob == 0.0) continue;
    for (int j = 0; j < g.m; ++j) {
      int winner = -1;
      for (int i = 0; i < g.n; ++i) {
        if (!((mask >> i) & 1) || g.bid(i, j) <= 0.0) continue;
        if (winner < 0 || g.higher_priority(j, i, winner)) winner = i;
      }
      if (winner < 0) continue;
      double price = 0.0;
      if (format == AuctionFormat::FirstPrice) {
        price = g.bid(winner, j);
      } else {
        for (int i = 0; i < g.n; ++i) {
          if (i == winner || !((mask >> i) & 1) || g.bid(i, j) <= 0.0) continue;
          price = std::max(price, g.bid(i, j));
        }
      }
      out[static_cast<size_t>(winner) * g.m + j] += prob * price;
    }
  }
  return out;
}

inline double brute_force_spend(const ThrottlingGame& g,
                                const ThrottleProfile& theta,
                                AuctionFormat format, int buyer) {
  auto p = brute_force_payments(g, theta, format);
  double s = 0.0;
  for (int j = 0; j < g.m; ++j) s += p[static_cast<size_t>(buyer) * g.m + j];
  return s;
}

struct RandomGameOptions {
  int max_n = 5;
  int max_m = 4;
  double zero_bid_prob = 0.2;
  double unbounded_prob = 0.0;
  double budget_lo = 0.1;
  double budget_hi = 2.0;
};

inline ThrottlingGame random_game(std::mt19937_64& rng,
                                  const RandomGameOptions& opt = {}) {
  const int n = 1 + static_cast<int>(unit(rng) * opt.max_n);
  const int m = 1 + static_cast<int>(unit(rng) * opt.max_m);
  std::vector<double> bids(static_cast<size_t>(n) * m);
  for (double& b : bids)
    b = unit(rng) < opt.zero_bid_prob ? 0.0 : 0.05 + unit(rng);
  std::vector<Budget> budgets;
  for (int i = 0; i < n; ++i) {
    if (unit(rng) < opt.unbounded_prob)
      budgets.push_back(Budget::unbounded());
    else
      budgets.push_back(Budget::finite(
          opt.budget_lo + (opt.budget_hi - opt.budget_lo) * unit(rng)));
  }
  return make_game(n, m, std::move(bids), std::move(budgets));
}

inline ThrottleProfile random_profile(std::mt19937_64& rng, int n) {
  ThrottleProfile theta(static_cast<size_t>(n));
  for (double& t : theta) t = unit(rng);
  return theta;
}

/// The first-price irrational-equilibrium fixture: bids [[2,2],[1,3]],
/// budgets (2,1). Its equilibrium solves 2*t1*(2-t2) = 2 and
/// 3*t2 + (1-t1)*t2 = 1.
inline ThrottlingGame irrational_fp_game() {
  return make_game(2, 2, {2, 2, 1, 3},
                   {Budget::finite(2.0), Budget::finite(1.0)});
}

/// Bisection on the eliminated variable: substituting t1 = 1/(2 - t2) into
/// buyer 2's budget equation gives h(t2) = 3*t2 + t2*(1 - t2)/(2 - t2) - 1,
/// increasing on [0, 1].
inline std::pair<double, double> irrational_fp_root() {
  auto h = [](double t2) {
    return 3.0 * t2 + t2 * (1.0 - t2) / (2.0 - t2) - 1.0;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? hi : lo) = mid;
  }
  const double t2 = 0.5 * (lo + hi);
  return {1.0 / (2.0 - t2), t2};
}

/// The second-price irrational fixture: 3 buyers, 4 goods, budgets (1,1,inf).
inline ThrottlingGame irrational_sp_game() {
  //            g0 g1 g2 g3
  return make_game(3, 4,
                   {2, 2, 0, 1,    // buyer 0
                    0, 1, 4, 4,    // buyer 1
                    1, 0, 2, 0},   // buyer 2
                   {Budget::finite(1.0), Budget::finite(1.0),
                    Budget::unbounded()});
}

inline ThrottleProfile irrational_sp_root() {
  const double t2 = (std::sqrt(3.0) - 1.0) / 2.0;
  return {1.0 / (1.0 + t2), t2, 1.0};
}

/// Second-price multiplicity fixture: bids [[2,1],[1,2]], budgets 1/2; every
/// profile with t1*t2 = 1/2 is an equilibrium.
inline ThrottlingGame multiplicity_game() {
  return make_game(2, 2, {2, 1, 1, 2},
                   {Budget::finite(0.5), Budget::finite(0.5)});
}

/// Revenue-comparison fixture 1: one good, bids (1/eps, 1-eps), budgets
/// (1, inf).
inline ThrottlingGame revcmp_game_1(double eps) {
  return make_game(2, 1, {1.0 / eps, 1.0 - eps},
                   {Budget::finite(1.0), Budget::unbounded()});
}

/// Revenue-comparison fixture 2: two goods, bids [[1+eps, 1],[1, 0]],
/// budgets (1-eps, inf).
inline ThrottlingGame revcmp_game_2(double eps) {
  return make_game(2, 2, {1.0 + eps, 1.0, 1.0, 0.0},
                   {Budget::finite(1.0 - eps), Budget::unbounded()});
}

}  // namespace teq::testing
