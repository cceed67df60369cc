#include "teq/sp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "teq/fp_solver.hpp"
#include "teq/kernels.hpp"
#include "teq/payments.hpp"

namespace teq {

void FixedPointConfig::validate() const {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("fixed-point delta must lie in (0, 1/2)");
  if (max_iterations < 1 || restart_seeds < 0)
    throw std::invalid_argument("iteration budget must be positive");
  if (!(damping > 0.0 && damping <= 1.0))
    throw std::invalid_argument("damping must lie in (0, 1]");
}

void GridOracleConfig::validate() const {
  if (!(step > 0.0 && step <= 1.0))
    throw std::invalid_argument("grid step must lie in (0, 1]");
  const double cells = 1.0 / step;
  if (std::abs(cells - std::round(cells)) > 1e-12)
    throw std::invalid_argument("grid step must divide 1");
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in [0,1)");
}

namespace {

int positive_bid_count(const ThrottlingGame& game, int j) {
  int c = 0;
  for (int i = 0; i < game.n; ++i) c += game.bid(i, j) > 0.0;
  return c;
}

void require_two_bid(const ThrottlingGame& game) {
  for (int j = 0; j < game.m; ++j)
    if (positive_bid_count(game, j) > 2)
      throw std::invalid_argument("good " + std::to_string(j) +
                                  " has more than two positive bids");
}

}  // namespace

std::pair<ThrottleProfile, DynamicsTrace> solve_sp_two_bid(
    const ThrottlingGame& game, double gamma, bool record_trace) {
  if (!(gamma > 0.0 && gamma < 1.0 / 3.0))
    throw std::invalid_argument("gamma must lie in (0, 1/3)");
  require_two_bid(game);

  PreparedGame pg(game);
  ThrottleProfile theta(game.n, 1.0);
  for (int i = 0; i < game.n; ++i) {
    if (game.budgets[i].is_unbounded()) continue;
    double row = 0.0;
    for (int j = 0; j < game.m; ++j) row += game.bid(i, j);
    if (row > 0.0)
      theta[i] = std::min(game.budgets[i].amount() / (2.0 * row), 1.0);
  }

  const double c = initialization_floor(game);
  const long max_rounds =
      10 * static_cast<long>(std::ceil(game.n * std::log(1.0 / c) / gamma)) + 10;

  const double g1 = 1.0 - gamma;
  DynamicsTrace trace;
  for (long round = 0;; ++round) {
    auto spends = sp_spend(pg, theta);
    bool active = false;
    for (int i = 0; i < game.n && !active; ++i)
      active = theta[i] < g1 && (game.budgets[i].is_unbounded() ||
                                 spends[i] < g1 * g1 * g1 *
                                                 game.budgets[i].amount());
    if (!active) {
      trace.terminal = theta;
      return {theta, trace};
    }
    if (round >= max_rounds)
      throw std::runtime_error("two-bid dynamics exceeded iteration bound");

    for (int i = 0; i < game.n; ++i)
      if (theta[i] < g1 && (game.budgets[i].is_unbounded() ||
                            spends[i] < g1 * g1 * game.budgets[i].amount()))
        theta[i] /= g1;
    spends = sp_spend(pg, theta);
    for (int i = 0; i < game.n; ++i)
      if (!game.budgets[i].is_unbounded() &&
          spends[i] > game.budgets[i].amount())
        theta[i] *= g1;

    ++trace.iterations;
    if (record_trace) trace.per_round.push_back({theta, sp_spend(pg, theta)});
  }
}

double sp_payment_two_bid(const ThrottlingGame& game,
                          const ThrottleProfile& theta, int i, int j) {
  check_profile(game, theta);
  if (i < 0 || i >= game.n || j < 0 || j >= game.m)
    throw std::invalid_argument("index out of range");
  if (positive_bid_count(game, j) > 2)
    throw std::invalid_argument("good has more than two positive bids");
  if (game.bid(i, j) <= 0.0) return 0.0;
  for (int k = 0; k < game.n; ++k) {
    if (k == i || game.bid(k, j) <= 0.0) continue;
    return game.higher_priority(j, i, k) ? theta[i] * theta[k] * game.bid(k, j)
                                         : 0.0;
  }
  return 0.0;  // sole positive bidder never pays
}

ThrottleProfile sp_fixed_point_map(const ThrottlingGame& game,
                                   const ThrottleProfile& theta, double delta) {
  check_profile(game, theta);
  if (!(delta >= 0.0 && delta < 0.5))
    throw std::invalid_argument("delta must lie in [0, 1/2)");
  PreparedGame pg(game);
  ThrottleProfile out(game.n, 1.0);
  ThrottleProfile probe = theta;
  for (int i = 0; i < game.n; ++i) {
    if (game.budgets[i].is_unbounded()) continue;
    const double saved = probe[i];
    probe[i] = 1.0;
    const double denom = sp_spend(pg, probe)[i];  // sum_j p(1, theta_-i)_ij
    probe[i] = saved;
    const double budget = game.budgets[i].amount();
    if (delta == 0.0) {
      out[i] = denom > 0.0 ? std::min(budget / denom, 1.0) : 1.0;
    } else {
      out[i] = std::min(
          (1.0 - delta / 2.0) * budget / std::max(denom, budget / 2.0), 1.0);
    }
  }
  return out;
}

FixedPointResult solve_sp_fixed_point(const ThrottlingGame& game,
                                      const FixedPointConfig& config) {
  config.validate();
  PreparedGame pg(game);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  FixedPointResult result;
  for (int attempt = 0; attempt <= config.restart_seeds; ++attempt) {
    ++result.seeds_tried;
    ThrottleProfile theta(game.n, 1.0);
    if (attempt > 0)
      for (double& t : theta) t = unif(rng);
    for (int it = 0; it < config.max_iterations; ++it) {
      ++result.iterations;
      auto fx = sp_fixed_point_map(game, theta, config.delta);
      double residual = 0.0;
      for (int i = 0; i < game.n; ++i)
        residual = std::max(residual, std::abs(fx[i] - theta[i]));
      for (int i = 0; i < game.n; ++i)
        theta[i] = (1.0 - config.damping) * theta[i] + config.damping * fx[i];
      const bool check = residual < 1e-12 || it % 16 == 15;
      if (check) {
        auto cert = certify_spends(game, theta, sp_spend(pg, theta),
                                   config.delta, AuctionFormat::SecondPrice);
        if (cert.accepted) {
          result.profile = theta;
          return result;
        }
      }
      if (residual < 1e-14) break;  // converged to a rejected point; restart
    }
  }
  return result;  // NotConverged
}

std::vector<ThrottleProfile> brute_force_equilibria(
    const ThrottlingGame& game, const GridOracleConfig& config,
    AuctionFormat format, double tolerance) {
  config.validate();
  const int levels = static_cast<int>(std::round(1.0 / config.step)) + 1;

  // Per-buyer admissible lattice values. A buyer whose slack condition is
  // unconditional (unbounded budget) can only pass with theta >= 1-delta.
  std::vector<std::vector<double>> values(game.n);
  for (int i = 0; i < game.n; ++i) {
    for (int v = 0; v < levels; ++v) {
      const double t = std::min(v * config.step, 1.0);
      if (game.budgets[i].is_unbounded() &&
          t < 1.0 - config.delta - tolerance)
        continue;
      values[i].push_back(t);
    }
  }
  double total = 1.0;
  for (const auto& vs : values) total *= static_cast<double>(vs.size());
  if (total > static_cast<double>(config.max_points))
    throw std::invalid_argument("grid too large for the configured cap");

  PreparedGame pg(game);
  constexpr std::size_t kBatch = 256;
  std::vector<double> theta_soa(kBatch * game.n);
  std::vector<double> spend_soa(kBatch * game.n);
  std::vector<ThrottleProfile> batch_profiles;
  batch_profiles.reserve(kBatch);
  std::vector<ThrottleProfile> hits;

  const auto& kern = spend_kernels();
  auto flush = [&]() {
    if (batch_profiles.empty()) return;
    const std::size_t w = batch_profiles.size();
    for (std::size_t lane = 0; lane < w; ++lane)
      for (int i = 0; i < game.n; ++i)
        theta_soa[static_cast<std::size_t>(i) * w + lane] =
            batch_profiles[lane][i];
    (format == AuctionFormat::FirstPrice ? kern.fp : kern.sp)(
        pg, theta_soa.data(), w, spend_soa.data());
    std::vector<double> spends(game.n);
    for (std::size_t lane = 0; lane < w; ++lane) {
      for (int i = 0; i < game.n; ++i)
        spends[i] = spend_soa[static_cast<std::size_t>(i) * w + lane];
      auto cert = certify_spends(game, batch_profiles[lane], spends,
                                 config.delta, format, tolerance);
      if (cert.accepted) hits.push_back(batch_profiles[lane]);
    }
    batch_profiles.clear();
  };

  // Odometer enumeration: first coordinate most significant, so hits come
  // out in lexicographic order.
  std::vector<std::size_t> idx(game.n, 0);
  ThrottleProfile theta(game.n);
  for (;;) {
    for (int i = 0; i < game.n; ++i) theta[i] = values[i][idx[i]];
    batch_profiles.push_back(theta);
    if (batch_profiles.size() == kBatch) flush();
    int pos = game.n - 1;
    while (pos >= 0 && ++idx[pos] == values[pos].size()) idx[pos--] = 0;
    if (pos < 0) break;
  }
  flush();
  return hits;
}

double lipschitz_bound(const ThrottlingGame& game) {
  double bmax = 0.0;
  for (double b : game.bids) bmax = std::max(bmax, b);
  double Bmax = 0.0, Bmin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& b : game.budgets) {
    if (b.is_unbounded()) continue;
    any = true;
    Bmax = std::max(Bmax, b.amount());
    Bmin = std::min(Bmin, b.amount());
  }
  if (!any)
    throw std::invalid_argument(
        "lipschitz bound undefined when all budgets are unbounded");
  return 2.0 * game.m * game.n * Bmax / (Bmin * Bmin) * bmax;
}

}  // namespace teq
