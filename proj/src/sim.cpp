#include "teq/sim.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "teq/fp_solver.hpp"
#include "teq/payments.hpp"

namespace teq {
namespace {

double to_unit(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

int sample_good(const RawMarket& market, double u) {
  double acc = 0.0;
  for (int j = 0; j < market.m; ++j) {
    acc += market.good_probs[static_cast<size_t>(j)];
    if (u < acc) return j;
  }
  return market.m - 1;
}

}  // namespace

void SimConfig::validate() const {
  if (rounds < 1) throw std::invalid_argument("sim: rounds must be >= 1");
}

SimReport simulate(const RawMarket& market, const ThrottleProfile& theta,
                   const SimConfig& config) {
  market.validate();
  config.validate();
  if (theta.size() != static_cast<size_t>(market.n))
    throw std::invalid_argument("sim: profile length must equal buyer count");
  for (double t : theta)
    if (!(t >= 0.0) || !(t <= 1.0))
      throw std::invalid_argument("sim: profile components must lie in [0,1]");

  const int n = market.n;
  const int m = market.m;
  std::mt19937_64 rng(config.seed);
  std::vector<double> sum(static_cast<size_t>(n) * m, 0.0);
  std::vector<double> sumsq(static_cast<size_t>(n) * m, 0.0);
  std::vector<char> active(static_cast<size_t>(n));

  for (long long t = 0; t < config.rounds; ++t) {
    const int j = sample_good(market, to_unit(rng()));
    for (int i = 0; i < n; ++i)
      active[static_cast<size_t>(i)] = to_unit(rng()) < theta[static_cast<size_t>(i)];
    int winner = -1;
    double top = 0.0, second = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!active[static_cast<size_t>(i)]) continue;
      const double b = market.raw_bid(i, j);
      if (b <= 0.0) continue;
      if (b > top) {  // ascending index scan: first max wins ties
        second = top;
        top = b;
        winner = i;
      } else if (b > second) {
        second = b;
      }
    }
    if (winner < 0) continue;
    const double price =
        config.format == AuctionFormat::FirstPrice ? top : second;
    const size_t idx = static_cast<size_t>(winner) * m + j;
    sum[idx] += price;
    sumsq[idx] += price * price;
  }

  SimReport rep;
  rep.empirical_payments.resize(static_cast<size_t>(n) * m);
  rep.standard_error.resize(static_cast<size_t>(n) * m);
  const double T = static_cast<double>(config.rounds);
  for (size_t k = 0; k < sum.size(); ++k) {
    const double mean = sum[k] / T;
    const double var = std::max(sumsq[k] / T - mean * mean, 0.0);
    rep.empirical_payments[k] = mean;
    rep.standard_error[k] = std::sqrt(var / T);
    rep.empirical_revenue += mean;
  }
  return rep;
}

DynamicsResult simulate_dynamics(const RawMarket& market,
                                 const std::vector<Budget>& budgets,
                                 double delta, long long epoch_len,
                                 const SimConfig& config) {
  market.validate();
  if (config.format != AuctionFormat::FirstPrice)
    throw std::invalid_argument("dynamics simulation is first-price only");
  if (!(delta > 0.0) || !(delta < 0.5))
    throw std::invalid_argument("dynamics: delta must lie in (0, 1/2)");
  if (epoch_len < 1)
    throw std::invalid_argument("dynamics: epoch length must be >= 1");
  if (budgets.size() != static_cast<size_t>(market.n))
    throw std::invalid_argument("dynamics: budget count must equal buyer count");

  ThrottlingGame game =
      make_game(market.n, market.m, rescale_bids(market), budgets);
  const int n = game.n;

  ThrottleProfile theta(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < game.m; ++j) row += game.bid(i, j);
    const auto& b = game.budgets[static_cast<size_t>(i)];
    theta[static_cast<size_t>(i)] =
        (b.is_unbounded() || row <= 0.0)
            ? 1.0
            : std::min(b.amount() / (2.0 * row), 1.0);
  }

  const double c = initialization_floor(game);
  const long long max_epochs =
      c < 1.0 ? static_cast<long long>(
                    std::ceil(n * std::log(1.0 / c) / delta)) +
                    1
              : 1;

  DynamicsResult result;
  SimConfig epoch_cfg = config;
  epoch_cfg.rounds = epoch_len;
  std::mt19937_64 seeds(config.seed);
  for (long long epoch = 0; epoch < max_epochs; ++epoch) {
    epoch_cfg.seed = seeds();
    SimReport rep = simulate(market, theta, epoch_cfg);
    std::vector<double> spend(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < game.m; ++j)
        spend[static_cast<size_t>(i)] += rep.pay(i, j, game.m);
    result.trace.per_round.push_back({theta, spend});
    bool updated = false;
    for (int i = 0; i < n; ++i) {
      double& t = theta[static_cast<size_t>(i)];
      const auto& b = game.budgets[static_cast<size_t>(i)];
      const bool slack = b.is_unbounded() ||
                         spend[static_cast<size_t>(i)] <
                             (1.0 - delta) * b.amount();
      if (t < 1.0 - delta && slack) {
        t /= 1.0 - delta;
        updated = true;
      }
    }
    ++result.trace.iterations;
    if (!updated) break;
  }
  result.trace.terminal = theta;
  result.certificate = verify_equilibrium(game, theta, 2.0 * delta,
                                          AuctionFormat::FirstPrice);
  return result;
}

}  // namespace teq
