#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "teq/payments.hpp"
#include "teq/sp_solver.hpp"

using namespace teq;
using namespace teq::testing;

namespace {

// Random games where every good has at most two positive bids.
ThrottlingGame random_two_bid_game(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nd(2, 5), md(1, 4);
  const int n = nd(rng), m = md(rng);
  std::vector<double> bids(static_cast<size_t>(n) * m, 0.0);
  for (int j = 0; j < m; ++j) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    int a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    bids[static_cast<size_t>(a) * m + j] = 0.1 + 2.0 * unit(rng);
    bids[static_cast<size_t>(b) * m + j] = 0.1 + 2.0 * unit(rng);
  }
  std::vector<Budget> budgets;
  for (int i = 0; i < n; ++i) {
    if (unit(rng) < 0.2)
      budgets.push_back(Budget::unbounded());
    else
      budgets.push_back(Budget::finite(0.05 + 1.5 * unit(rng)));
  }
  return make_game(n, m, bids, budgets);
}

}  // namespace

TEST_CASE("two-bid algorithm on the multiplicity game") {
  auto g = multiplicity_game();
  const double gamma = 0.01;
  auto [theta, trace] = solve_sp_two_bid(g, gamma);
  CHECK(verify_equilibrium(g, theta, 3 * gamma, AuctionFormat::SecondPrice)
            .accepted);
  const double prod = theta[0] * theta[1];
  CHECK(prod >= (1.0 - 3 * gamma) / 2.0);
  CHECK(prod <= 0.5 + 1e-12);
  CHECK(theta[0] >= 0.45);
  CHECK(theta[1] >= 0.45);
}

TEST_CASE("two-bid algorithm trivial and asymmetric cases") {
  auto free_game = make_game(2, 1, {2, 1},
                             {Budget::unbounded(), Budget::unbounded()});
  auto [free_theta, t1] = solve_sp_two_bid(free_game, 0.01);
  CHECK(free_theta[0] == 1.0);
  CHECK(free_theta[1] == 1.0);

  // buyer 1 pays theta1*theta2*1, so theta1 ~ 1/4 once theta2 = 1
  auto g = make_game(2, 1, {2, 1}, {Budget::finite(0.25), Budget::unbounded()});
  auto [theta, t2] = solve_sp_two_bid(g, 0.01);
  CHECK(theta[1] == 1.0);
  CHECK(theta[0] == doctest::Approx(0.25).epsilon(0.05));
  CHECK(verify_equilibrium(g, theta, 0.03, AuctionFormat::SecondPrice).accepted);
}

TEST_CASE("two-bid algorithm input validation") {
  auto three = make_game(3, 1, {1, 1, 1},
                         {Budget::finite(1), Budget::finite(1), Budget::finite(1)});
  CHECK_THROWS_AS(solve_sp_two_bid(three, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(solve_sp_two_bid(multiplicity_game(), 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_sp_two_bid(multiplicity_game(), 1.0 / 3.0),
                  std::invalid_argument);

  // one positive bid per good is fine: no payment can occur
  auto solo = make_game(2, 1, {1, 0}, {Budget::finite(0.1), Budget::finite(1)});
  auto [theta, trace] = solve_sp_two_bid(solo, 0.01);
  CHECK(theta[0] >= 0.97);
}

TEST_CASE("two-bid algorithm: random games verify, traces are safe and progress") {
  std::mt19937_64 rng(317);
  const double gamma = 0.01;
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_two_bid_game(rng);
    auto [theta, trace] = solve_sp_two_bid(g, gamma);
    CHECK(verify_equilibrium(g, theta, 3 * gamma, AuctionFormat::SecondPrice)
              .accepted);

    std::set<int> settled;  // safety + monotone progress set
    for (const auto& round : trace.per_round) {
      std::set<int> now;
      for (int i = 0; i < g.n; ++i) {
        const auto& b = g.budgets[static_cast<size_t>(i)];
        const double s = round.per_buyer_spend[static_cast<size_t>(i)];
        if (!b.is_unbounded()) {
          CHECK(s <= b.amount() + 1e-9);
          if (s >= std::pow(1.0 - gamma, 3) * b.amount() - 1e-12 ||
              round.profile[static_cast<size_t>(i)] >= 1.0 - gamma - 1e-12)
            now.insert(i);
        } else {
          now.insert(i);
        }
      }
      for (int i : settled) CHECK(now.count(i) == 1);
      settled = now;
    }
  }
}

TEST_CASE("sp_payment_two_bid closed form") {
  auto g = make_game(2, 1, {2, 1}, {Budget::finite(1), Budget::finite(1)});
  ThrottleProfile theta = {0.5, 0.5};
  CHECK(sp_payment_two_bid(g, theta, 0, 0) == doctest::Approx(0.25));
  CHECK(sp_payment_two_bid(g, theta, 1, 0) == 0.0);

  auto solo = make_game(2, 1, {1, 0}, {Budget::finite(1), Budget::finite(1)});
  CHECK(sp_payment_two_bid(solo, theta, 0, 0) == 0.0);

  auto three = make_game(3, 1, {1, 1, 1},
                         {Budget::finite(1), Budget::finite(1), Budget::finite(1)});
  CHECK_THROWS_AS(sp_payment_two_bid(three, {1, 1, 1}, 0, 0),
                  std::invalid_argument);
}

TEST_CASE("sp_payment_two_bid matches the general payment formula") {
  std::mt19937_64 rng(331);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = random_two_bid_game(rng);
    auto theta = random_profile(rng, g.n);
    auto report = expected_payments_sp(g, theta);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.m; ++j)
        CHECK(sp_payment_two_bid(g, theta, i, j) ==
              doctest::Approx(report.pay(i, j, g.m)).epsilon(1e-12));
  }
}

TEST_CASE("sp_fixed_point_map examples") {
  auto g = multiplicity_game();
  auto f = sp_fixed_point_map(g, {1.0, 1.0}, 0.0);
  CHECK(f[0] == doctest::Approx(0.5));
  CHECK(f[1] == doctest::Approx(0.5));

  // exact equilibrium is a fixed point of the delta=0 map
  const double r = 1.0 / std::sqrt(2.0);
  auto fr = sp_fixed_point_map(g, {r, r}, 0.0);
  CHECK(fr[0] == doctest::Approx(r).epsilon(1e-12));
  CHECK(fr[1] == doctest::Approx(r).epsilon(1e-12));

  auto u = make_game(2, 1, {2, 1}, {Budget::unbounded(), Budget::finite(0.3)});
  auto fu = sp_fixed_point_map(u, {0.2, 0.9}, 0.0);
  CHECK(fu[0] == 1.0);

  // zero denominator maps to 1
  auto lone = make_game(1, 1, {1}, {Budget::finite(0.5)});
  CHECK(sp_fixed_point_map(lone, {0.3}, 0.0)[0] == 1.0);

  CHECK_THROWS_AS(sp_fixed_point_map(g, {1.0, 1.0}, 0.5), std::invalid_argument);
}

TEST_CASE("delta=0 fixed points coincide with exact equilibria on random games") {
  std::mt19937_64 rng(337);
  for (int trial = 0; trial < 40; ++trial) {
    RandomGameOptions opt;
    opt.unbounded_prob = 0.15;
    auto g = random_game(rng, opt);
    auto theta = random_profile(rng, g.n);
    auto f = sp_fixed_point_map(g, theta, 0.0);
    double resid = 0.0;
    for (int i = 0; i < g.n; ++i) resid = std::max(resid, std::abs(f[i] - theta[i]));
    const bool eq = verify_equilibrium(g, theta, 0.0, AuctionFormat::SecondPrice,
                                       1e-7)
                        .accepted;
    if (eq) CHECK(resid < 1e-4);  // equilibria are (near-)fixed points
  }
}

TEST_CASE("solve_sp_fixed_point recovers the irrational second-price fixture") {
  auto g = irrational_sp_game();
  FixedPointConfig cfg;
  cfg.delta = 1e-3;
  auto res = solve_sp_fixed_point(g, cfg);
  REQUIRE(res.profile.has_value());
  auto root = irrational_sp_root();
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs((*res.profile)[static_cast<size_t>(i)] - root[static_cast<size_t>(i)]) <
          5e-3);
  CHECK(verify_equilibrium(g, *res.profile, cfg.delta, AuctionFormat::SecondPrice)
            .accepted);
}

TEST_CASE("solve_sp_fixed_point on the multiplicity game and trivial cases") {
  FixedPointConfig cfg;
  cfg.delta = 0.01;
  auto res = solve_sp_fixed_point(multiplicity_game(), cfg);
  REQUIRE(res.profile.has_value());
  CHECK(std::abs((*res.profile)[0] * (*res.profile)[1] - 0.5) <= 0.02);

  auto u = make_game(2, 1, {2, 1}, {Budget::unbounded(), Budget::unbounded()});
  auto ru = solve_sp_fixed_point(u, cfg);
  REQUIRE(ru.profile.has_value());
  CHECK((*ru.profile)[0] == 1.0);
  CHECK((*ru.profile)[1] == 1.0);
}

TEST_CASE("fixed-point iteration is deterministic per seed") {
  auto g = irrational_sp_game();
  FixedPointConfig cfg;
  cfg.delta = 1e-3;
  cfg.seed = 42;
  auto a = solve_sp_fixed_point(g, cfg);
  auto b = solve_sp_fixed_point(g, cfg);
  REQUIRE(a.profile.has_value());
  REQUIRE(b.profile.has_value());
  CHECK(*a.profile == *b.profile);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("grid oracle on the multiplicity game") {
  GridOracleConfig cfg;
  cfg.step = 1.0 / 32.0;
  cfg.delta = 0.05;
  auto hits = brute_force_equilibria(multiplicity_game(), cfg,
                                     AuctionFormat::SecondPrice);
  CHECK(hits.size() >= 3);
  for (const auto& h : hits) {
    CHECK(h[0] * h[1] >= 0.45);
    CHECK(h[0] * h[1] <= 0.5 + 1e-12);
    CHECK(h[0] >= 0.45);
    CHECK(h[1] >= 0.45);
  }
  CHECK(std::is_sorted(hits.begin(), hits.end()));
}

TEST_CASE("grid oracle trivial and first-price cases") {
  auto u = make_game(2, 1, {2, 1}, {Budget::unbounded(), Budget::unbounded()});
  GridOracleConfig cfg;
  cfg.step = 0.25;
  cfg.delta = 0.0;
  auto hits = brute_force_equilibria(u, cfg, AuctionFormat::SecondPrice);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0] == ThrottleProfile{1.0, 1.0});

  GridOracleConfig fine;
  fine.step = 1.0 / 64.0;
  fine.delta = 0.05;
  auto fp_hits = brute_force_equilibria(irrational_fp_game(), fine,
                                        AuctionFormat::FirstPrice);
  CHECK(!fp_hits.empty());
  auto [t1, t2] = irrational_fp_root();
  for (const auto& h : fp_hits) {
    CHECK(std::abs(h[0] - t1) <= 0.1);
    CHECK(std::abs(h[1] - t2) <= 0.1);
  }
}

TEST_CASE("grid oracle configuration validation") {
  GridOracleConfig bad;
  bad.step = 0.3;  // does not divide 1
  CHECK_THROWS_AS(
      brute_force_equilibria(multiplicity_game(), bad, AuctionFormat::SecondPrice),
      std::invalid_argument);

  GridOracleConfig tiny;
  tiny.step = 1.0 / 64.0;
  tiny.max_points = 10;
  CHECK_THROWS_AS(
      brute_force_equilibria(multiplicity_game(), tiny, AuctionFormat::SecondPrice),
      std::invalid_argument);
}

TEST_CASE("fixed-point solutions land near grid hits at matched delta") {
  GridOracleConfig grid;
  grid.step = 1.0 / 32.0;
  grid.delta = 0.05;
  FixedPointConfig cfg;
  cfg.delta = 0.05;
  for (const auto& g : {multiplicity_game(), irrational_sp_game()}) {
    auto res = solve_sp_fixed_point(g, cfg);
    REQUIRE(res.profile.has_value());
    auto hits = brute_force_equilibria(g, grid, AuctionFormat::SecondPrice);
    REQUIRE(!hits.empty());
    double best = 1e9;
    for (const auto& h : hits) {
      double d = 0.0;
      for (int i = 0; i < g.n; ++i)
        d = std::max(d, std::abs(h[static_cast<size_t>(i)] -
                                 (*res.profile)[static_cast<size_t>(i)]));
      best = std::min(best, d);
    }
    CHECK(best <= grid.step + 1e-12);
  }
}

TEST_CASE("lipschitz_bound formula") {
  CHECK(lipschitz_bound(multiplicity_game()) == doctest::Approx(32.0));

  auto unitg = make_game(1, 1, {1}, {Budget::finite(1)});
  CHECK(lipschitz_bound(unitg) == doctest::Approx(2.0));

  auto g = make_game(2, 2, {2, 1, 1, 2},
                     {Budget::finite(1.0), Budget::finite(1.0)});
  auto doubled = make_game(2, 2, {2, 1, 1, 2},
                           {Budget::finite(2.0), Budget::finite(2.0)});
  CHECK(lipschitz_bound(g) == doctest::Approx(2.0 * lipschitz_bound(doubled)));

  auto all_unbounded =
      make_game(1, 1, {1}, {Budget::unbounded()});
  CHECK_THROWS_AS(lipschitz_bound(all_unbounded), std::invalid_argument);
}
