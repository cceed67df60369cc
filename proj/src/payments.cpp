#include "teq/payments.hpp"

#include <cmath>

#include "teq/kernels.hpp"

namespace teq {

void check_profile(const ThrottlingGame& game, const ThrottleProfile& theta) {
  if (theta.size() != static_cast<size_t>(game.n))
    throw std::invalid_argument("profile length does not match buyer count");
  for (double t : theta)
    if (!(t >= 0.0 && t <= 1.0))
      throw std::invalid_argument("throttling parameters must lie in [0,1]");
}

namespace {

PaymentReport finish(const ThrottlingGame& game, std::vector<double> per_pair) {
  PaymentReport r;
  r.per_pair = std::move(per_pair);
  r.per_buyer.assign(game.n, 0.0);
  for (int i = 0; i < game.n; ++i)
    for (int j = 0; j < game.m; ++j)
      r.per_buyer[i] += r.per_pair[static_cast<size_t>(i) * game.m + j];
  r.revenue = 0.0;
  for (double s : r.per_buyer) r.revenue += s;
  return r;
}

}  // namespace

PaymentReport expected_payments_fp(const ThrottlingGame& game,
                                   const ThrottleProfile& theta) {
  check_profile(game, theta);
  PreparedGame pg(game);
  std::vector<double> pp(static_cast<size_t>(game.n) * game.m, 0.0);
  for (int j = 0; j < game.m; ++j) {
    const auto& good = pg.goods[j];
    double pre = 1.0;
    for (size_t t = 0; t < good.buyer.size(); ++t) {
      int i = good.buyer[t];
      pp[static_cast<size_t>(i) * game.m + j] = theta[i] * good.bid[t] * pre;
      pre *= 1.0 - theta[i];
    }
  }
  return finish(game, std::move(pp));
}

PaymentReport expected_payments_sp(const ThrottlingGame& game,
                                   const ThrottleProfile& theta) {
  check_profile(game, theta);
  PreparedGame pg(game);
  std::vector<double> pp(static_cast<size_t>(game.n) * game.m, 0.0);
  for (int j = 0; j < game.m; ++j) {
    const auto& good = pg.goods[j];
    const size_t k = good.buyer.size();
    for (size_t u = 1; u < k; ++u) {
      // b_u is the second price when the buyer at position u participates and
      // everyone strictly between the winner and u sits out.
      double suf = 1.0;
      double pre = 1.0;
      std::vector<double> prefix(u);
      for (size_t v = 0; v < u; ++v) {
        prefix[v] = pre;
        pre *= 1.0 - theta[good.buyer[v]];
      }
      for (size_t t = u; t-- > 0;) {
        int i = good.buyer[t];
        pp[static_cast<size_t>(i) * game.m + j] +=
            good.bid[u] * theta[good.buyer[u]] * theta[i] * prefix[t] * suf;
        suf *= 1.0 - theta[i];
      }
    }
  }
  return finish(game, std::move(pp));
}

PaymentReport expected_payments(const ThrottlingGame& game,
                                const ThrottleProfile& theta,
                                AuctionFormat format) {
  return format == AuctionFormat::FirstPrice ? expected_payments_fp(game, theta)
                                             : expected_payments_sp(game, theta);
}

Allocation expected_allocation(const ThrottlingGame& game,
                               const ThrottleProfile& theta) {
  check_profile(game, theta);
  PreparedGame pg(game);
  Allocation a;
  a.y.assign(static_cast<size_t>(game.n) * game.m, 0.0);
  for (int j = 0; j < game.m; ++j) {
    double pre = 1.0;
    for (int i : pg.goods[j].buyer) {
      a.y[static_cast<size_t>(i) * game.m + j] = theta[i] * pre;
      pre *= 1.0 - theta[i];
    }
  }
  return a;
}

double liquid_welfare(const ThrottlingGame& game, const Allocation& alloc) {
  if (alloc.y.size() != static_cast<size_t>(game.n) * game.m)
    throw std::invalid_argument("allocation dimension mismatch");
  double total = 0.0;
  for (int i = 0; i < game.n; ++i) {
    double mass = 0.0;
    for (int j = 0; j < game.m; ++j)
      mass += game.bid(i, j) * alloc.at(i, j, game.m);
    total += game.budgets[i].is_unbounded()
                 ? mass
                 : std::min(mass, game.budgets[i].amount());
  }
  return total;
}

EquilibriumCertificate certify_spends(const ThrottlingGame& game,
                                      const ThrottleProfile& theta,
                                      const std::vector<double>& per_buyer_spend,
                                      double delta, AuctionFormat format,
                                      double tolerance) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in [0,1)");
  EquilibriumCertificate cert;
  cert.delta = delta;
  cert.format = format;
  cert.per_buyer_spend = per_buyer_spend;
  for (int i = 0; i < game.n; ++i) {
    const double s = per_buyer_spend[i];
    const bool unbounded = game.budgets[i].is_unbounded();
    if (!unbounded && s > game.budgets[i].amount() + tolerance) {
      cert.violations.push_back({i, ViolationKind::BudgetViolated,
                                 s - game.budgets[i].amount()});
      continue;
    }
    const bool slack =
        unbounded || s < (1.0 - delta) * game.budgets[i].amount() - tolerance;
    if (slack && theta[i] < 1.0 - delta - tolerance) {
      cert.violations.push_back(
          {i, ViolationKind::UnnecessaryThrottling, (1.0 - delta) - theta[i]});
    }
  }
  cert.accepted = cert.violations.empty();
  return cert;
}

EquilibriumCertificate verify_equilibrium(const ThrottlingGame& game,
                                          const ThrottleProfile& theta,
                                          double delta, AuctionFormat format,
                                          double tolerance) {
  check_profile(game, theta);
  PreparedGame pg(game);
  return certify_spends(game, theta, spend(pg, theta, format), delta, format,
                        tolerance);
}

bool is_budget_feasible(const ThrottlingGame& game,
                        const ThrottleProfile& theta, AuctionFormat format,
                        double tolerance) {
  check_profile(game, theta);
  PreparedGame pg(game);
  auto s = spend(pg, theta, format);
  for (int i = 0; i < game.n; ++i)
    if (!game.budgets[i].is_unbounded() &&
        s[i] > game.budgets[i].amount() + tolerance)
      return false;
  return true;
}

}  // namespace teq
