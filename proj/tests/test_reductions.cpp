#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"
#include "teq/payments.hpp"
#include "teq/reductions.hpp"
#include "teq/sp_solver.hpp"

using namespace teq;
using namespace teq::testing;

namespace {

ThresholdGame two_cycle(double eps) {
  ThresholdGame tg;
  tg.node_count = 2;
  tg.edges = {{0, 1}, {1, 0}};
  tg.epsilon = eps;
  return tg;
}

}  // namespace

TEST_CASE("reduction constants") {
  {
    auto [M, delta] = threshold_reduction_constants(0.5);
    CHECK(delta == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
    CHECK(M == doctest::Approx(1120.0).epsilon(1e-12));
  }
  {
    auto [M, delta] = threshold_reduction_constants(0.9);
    CHECK(delta == doctest::Approx(0.9 / 3.9).epsilon(1e-15));
    CHECK(M == doctest::Approx(160.0 * 3.9 / 0.9).epsilon(1e-12));
  }
  {
    // eps/(3+eps) < min{eps/2, 1/4} on all of (0,1), so that term always wins
    auto [M, delta] = threshold_reduction_constants(0.99);
    CHECK(delta == doctest::Approx(0.99 / 3.99).epsilon(1e-15));
    CHECK(M == doctest::Approx(160.0 * 3.99 / 0.99).epsilon(1e-12));
  }
}

TEST_CASE("two-cycle construction") {
  auto [g, mp] = threshold_to_throttling(two_cycle(0.5));
  CHECK(g.n == 4);
  CHECK(g.m == 4);
  CHECK(mp.M == doctest::Approx(1120.0));
  CHECK(mp.delta == doctest::Approx(1.0 / 7.0));

  const int T0 = mp.threshold_buyer[0], S0 = mp.strategy_buyer[0];
  const int T1 = mp.threshold_buyer[1], S1 = mp.strategy_buyer[1];
  const int G01 = mp.find_neighbor_good(0, 1);  // G(0,1): node 0, in-neighbor 1
  const int G10 = mp.find_neighbor_good(1, 0);
  const int R0 = mp.reciprocal_good[0], R1 = mp.reciprocal_good[1];

  CHECK(g.bid(T0, G01) == 5.0);
  CHECK(g.bid(S0, G01) == 4.0);
  CHECK(g.bid(S1, G01) == 6.0);  // S(1) reaches into node 0's neighbor good
  CHECK(g.bid(T0, R0) == 1120.0);
  CHECK(g.bid(S0, R0) == 1121.0);
  CHECK(g.bid(T0, G10) == 0.0);
  CHECK(g.bid(T0, R1) == 0.0);
  CHECK(g.bid(T1, G10) == 5.0);
  CHECK(g.bid(S1, R1) == 1121.0);

  CHECK(g.budgets[static_cast<size_t>(T0)].amount() == 0.5);
  CHECK(g.budgets[static_cast<size_t>(S0)].amount() == 560.0);
  CHECK(g.budgets[static_cast<size_t>(T1)].amount() == 0.5);
  CHECK(g.budgets[static_cast<size_t>(S1)].amount() == 560.0);

  // every good carries at most three positive bids
  for (int j = 0; j < g.m; ++j) {
    int pos = 0;
    for (int i = 0; i < g.n; ++i) pos += g.bid(i, j) > 0.0;
    CHECK(pos <= 3);
  }
}

TEST_CASE("nodes without out-edges are rejected") {
  ThresholdGame tg;
  tg.node_count = 1;
  tg.epsilon = 0.5;
  CHECK_THROWS_WITH_AS(threshold_to_throttling(tg),
                       doctest::Contains("no out-edges"), std::invalid_argument);

  ThresholdGame chain;  // 0 -> 1; node 1 has no out-edge
  chain.node_count = 2;
  chain.edges = {{0, 1}};
  chain.epsilon = 0.5;
  CHECK_THROWS_AS(threshold_to_throttling(chain), std::invalid_argument);
}

TEST_CASE("threshold game validation") {
  ThresholdGame tg;
  tg.node_count = 2;
  tg.edges = {{0, 1}, {0, 1}, {0, 1}, {0, 1}};  // out-degree 4
  tg.epsilon = 0.5;
  CHECK_THROWS_AS(tg.validate(), std::invalid_argument);
  tg.edges = {{0, 5}};
  CHECK_THROWS_AS(tg.validate(), std::invalid_argument);
  tg.edges = {{0, 1}};
  tg.epsilon = 1.5;
  CHECK_THROWS_AS(tg.validate(), std::invalid_argument);
}

TEST_CASE("extract_threshold_strategy formula") {
  ReductionMapping mp;
  mp.strategy_buyer = {1, 3};
  CHECK(extract_threshold_strategy({0.0, 1.0, 0.0, 0.5}, mp) ==
        std::vector<double>{0.0, 1.0});
  auto x = extract_threshold_strategy({0.0, 0.7, 0.0, 0.2}, mp);
  CHECK(x[0] == doctest::Approx(0.6));
  CHECK(x[1] == 1.0);  // 2*(1-0.2) caps at 1
}

TEST_CASE("verify_threshold_equilibrium cases") {
  auto tg = two_cycle(0.5);
  CHECK(verify_threshold_equilibrium(tg, {0.5, 0.5}, 0.5).ok);
  CHECK(verify_threshold_equilibrium(tg, {0.5, 0.5}, 0.01).ok);

  tg.epsilon = 0.2;
  auto bad = verify_threshold_equilibrium(tg, {1.0, 1.0}, 0.2);
  CHECK(!bad.ok);
  CHECK(bad.issues.size() == 2);
  CHECK(bad.issues[0].in_sum == doctest::Approx(1.0));

  // isolated node: empty in-sum is 0 < 0.5 - eps, forcing x >= 1 - eps
  ThresholdGame lone;
  lone.node_count = 1;
  lone.epsilon = 0.2;
  CHECK(verify_threshold_equilibrium(lone, {1.0}, 0.2).ok);
  CHECK(!verify_threshold_equilibrium(lone, {0.0}, 0.2).ok);

  CHECK_THROWS_AS(verify_threshold_equilibrium(tg, {0.5}, 0.2),
                  std::invalid_argument);
  CHECK_THROWS_AS(verify_threshold_equilibrium(tg, {0.5, 1.5}, 0.2),
                  std::invalid_argument);
}

TEST_CASE("gadget payment identities on random profiles") {
  ThresholdGame tg;  // 3 nodes, mixed degrees, no self-loops (a self-loop
                     // would overwrite S(i)'s bid of 4 with its own 6)
  tg.node_count = 3;
  tg.edges = {{0, 1}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  tg.epsilon = 0.4;
  auto [g, mp] = threshold_to_throttling(tg);
  auto out = tg.out_neighbors();
  auto in = tg.in_neighbors();

  std::mt19937_64 rng(401);
  for (int trial = 0; trial < 100; ++trial) {
    auto theta = random_profile(rng, g.n);
    auto report = expected_payments_sp(g, theta);
    for (int i = 0; i < tg.node_count; ++i) {
      const int T = mp.threshold_buyer[static_cast<size_t>(i)];
      const int S = mp.strategy_buyer[static_cast<size_t>(i)];
      const double tT = theta[static_cast<size_t>(T)];
      const double tS = theta[static_cast<size_t>(S)];
      // T(i) pays nothing on the reciprocal good
      CHECK(report.pay(T, mp.reciprocal_good[static_cast<size_t>(i)], g.m) ==
            doctest::Approx(0.0).epsilon(1e-9));
      // S(i) pays theta_S theta_T M|O_i| on it
      const double deg = static_cast<double>(out[static_cast<size_t>(i)].size());
      CHECK(report.pay(S, mp.reciprocal_good[static_cast<size_t>(i)], g.m) ==
            doctest::Approx(tS * tT * mp.M * deg).epsilon(1e-9));
      for (int j : in[static_cast<size_t>(i)]) {
        const int Sj = mp.strategy_buyer[static_cast<size_t>(j)];
        const int good = mp.find_neighbor_good(i, j);
        const double tSj = theta[static_cast<size_t>(Sj)];
        CHECK(report.pay(T, good, g.m) ==
              doctest::Approx((1.0 - tSj) * tT * tS * 4.0).epsilon(1e-9));
      }
      // S(i)'s payment in out-neighbours' goods G(j,i) for j in O_i
      for (int j : out[static_cast<size_t>(i)]) {
        const int good = mp.find_neighbor_good(j, i);
        const int Tj = mp.threshold_buyer[static_cast<size_t>(j)];
        const int Sj = mp.strategy_buyer[static_cast<size_t>(j)];
        const double tTj = theta[static_cast<size_t>(Tj)];
        const double tSj = theta[static_cast<size_t>(Sj)];
        CHECK(report.pay(S, good, g.m) ==
              doctest::Approx(tS * (tTj * 5.0 + (1.0 - tTj) * tSj * 4.0))
                  .epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("reduction soundness on a self-loop node") {
  // smallest legal threshold game: one node with a self-loop
  ThresholdGame tg;
  tg.node_count = 1;
  tg.edges = {{0, 0}};
  tg.epsilon = 0.5;
  auto [g, mp] = threshold_to_throttling(tg);
  CHECK(g.n == 2);
  CHECK(g.m == 2);

  GridOracleConfig cfg;
  cfg.step = 1.0 / 16.0;
  cfg.delta = mp.delta;
  auto hits = brute_force_equilibria(g, cfg, AuctionFormat::SecondPrice);
  CHECK(!hits.empty());
  for (const auto& h : hits) {
    auto x = extract_threshold_strategy(h, mp);
    CHECK(verify_threshold_equilibrium(tg, x, tg.epsilon).ok);
    CHECK(h[static_cast<size_t>(mp.strategy_buyer[0])] >=
          (1.0 - 2.0 * mp.delta) / 2.0 - 1e-12);
    CHECK(h[static_cast<size_t>(mp.threshold_buyer[0])] >= 1.0 / 32.0);
  }
}

TEST_CASE("reduction soundness on the two-cycle" * doctest::timeout(300)) {
  auto tg = two_cycle(0.5);
  auto [g, mp] = threshold_to_throttling(tg);
  GridOracleConfig cfg;
  cfg.step = 1.0 / 16.0;
  cfg.delta = mp.delta;
  auto hits = brute_force_equilibria(g, cfg, AuctionFormat::SecondPrice);
  CHECK(!hits.empty());
  for (const auto& h : hits) {
    auto x = extract_threshold_strategy(h, mp);
    CHECK(verify_threshold_equilibrium(tg, x, tg.epsilon).ok);
    for (int i = 0; i < 2; ++i) {
      CHECK(h[static_cast<size_t>(mp.strategy_buyer[static_cast<size_t>(i)])] >=
            (1.0 - 2.0 * mp.delta) / 2.0 - 1e-12);
      CHECK(h[static_cast<size_t>(mp.threshold_buyer[static_cast<size_t>(i)])] >=
            1.0 / 32.0);
    }
  }
}

TEST_CASE("dimacs parsing") {
  std::istringstream in(
      "c sample\n"
      "p cnf 3 2\n"
      "1 -2 3 0\n"
      "-1 2 0\n");
  auto cnf = parse_dimacs(in);
  CHECK(cnf.var_count == 3);
  REQUIRE(cnf.clauses.size() == 2);
  CHECK(cnf.clauses[0] == std::vector<int>{1, -2, 3});
  CHECK(cnf.clauses[1] == std::vector<int>{-1, 2});

  std::istringstream no_header("1 2 0\n");
  CHECK_THROWS_AS(parse_dimacs(no_header), std::invalid_argument);

  std::istringstream bad_lit("p cnf 1 1\n2 0\n");
  CHECK_THROWS_AS(parse_dimacs(bad_lit), std::invalid_argument);

  // trailing clause without terminating zero is accepted
  std::istringstream no_zero("p cnf 2 1\n1 -2\n");
  auto tail = parse_dimacs(no_zero);
  CHECK(tail.clauses.size() == 1);
}

TEST_CASE("cnf validation") {
  CnfFormula cnf;
  cnf.var_count = 0;
  CHECK_THROWS_AS(cnf.validate(), std::invalid_argument);
  cnf.var_count = 2;
  cnf.clauses = {{}};
  CHECK_THROWS_AS(cnf.validate(), std::invalid_argument);
  cnf.clauses = {{1, 2, -1, -2}};
  CHECK_THROWS_AS(cnf.validate(), std::invalid_argument);
  cnf.clauses = {{1, -2}};
  CHECK_NOTHROW(cnf.validate());
}

TEST_CASE("sat gadget layout for a single positive clause") {
  CnfFormula cnf;
  cnf.var_count = 1;
  cnf.clauses = {{1}};
  auto red = sat_to_rev(cnf);
  const auto& g = red.game;
  CHECK(g.n == 3);
  CHECK(g.m == 5);
  CHECK(red.target_revenue == doctest::Approx(3.5));

  const int P = red.buyer_pos(0), N = red.buyer_neg(0), U = red.buyer_u();
  CHECK(g.bid(P, red.good_a(0)) == 2.0);
  CHECK(g.bid(P, red.good_b(0)) == 1.0);
  CHECK(g.bid(P, red.good_s(0)) == 1.0);
  CHECK(g.bid(P, red.good_c(0)) == 1.0);
  CHECK(g.bid(N, red.good_a(0)) == 1.0);
  CHECK(g.bid(N, red.good_b(0)) == 2.0);
  CHECK(g.bid(N, red.good_t(0)) == 1.0);
  CHECK(g.bid(N, red.good_c(0)) == 0.0);
  CHECK(g.bid(U, red.good_s(0)) == 2.0);
  CHECK(g.bid(U, red.good_t(0)) == 2.0);
  CHECK(g.bid(U, red.good_c(0)) == 2.0);
  CHECK(g.budgets[static_cast<size_t>(P)].amount() == 0.5);
  CHECK(g.budgets[static_cast<size_t>(N)].amount() == 0.5);
  CHECK(g.budgets[static_cast<size_t>(U)].is_unbounded());

  // negated-literal variant moves the clause bid to the negative buyer
  CnfFormula neg;
  neg.var_count = 1;
  neg.clauses = {{-1}};
  auto nred = sat_to_rev(neg);
  CHECK(nred.game.bid(nred.buyer_pos(0), nred.good_c(0)) == 0.0);
  CHECK(nred.game.bid(nred.buyer_neg(0), nred.good_c(0)) == 1.0);

  // clause-free formula: R = n + 0 + 1.5n
  CnfFormula empty;
  empty.var_count = 2;
  auto ered = sat_to_rev(empty);
  CHECK(ered.target_revenue == doctest::Approx(5.0));
  CHECK(ered.game.m == 8);
}

TEST_CASE("assignment_to_equilibrium profiles") {
  CnfFormula cnf;
  cnf.var_count = 2;
  cnf.clauses = {{1, -2}};
  CHECK(assignment_to_equilibrium(cnf, {true, false}) ==
        ThrottleProfile{1.0, 0.5, 0.5, 1.0, 1.0});
  CnfFormula one;
  one.var_count = 1;
  one.clauses = {{1}};
  CHECK(assignment_to_equilibrium(one, {true}) == ThrottleProfile{1.0, 0.5, 1.0});
  CHECK(assignment_to_equilibrium(one, {false}) ==
        ThrottleProfile{0.5, 1.0, 1.0});
  CHECK_THROWS_AS(assignment_to_equilibrium(one, {true, false}),
                  std::invalid_argument);
}

TEST_CASE("satisfying assignments hit the revenue target exactly") {
  struct Case {
    CnfFormula cnf;
    std::vector<bool> assignment;
  };
  std::vector<Case> cases;
  {
    CnfFormula c;
    c.var_count = 1;
    c.clauses = {{1}};
    cases.push_back({c, {true}});
  }
  {
    CnfFormula c;
    c.var_count = 2;
    c.clauses = {{1, 2}, {-1, 2}};
    cases.push_back({c, {false, true}});
  }
  {
    CnfFormula c;
    c.var_count = 3;
    c.clauses = {{1, -2, 3}, {-1, -3}, {2, 3}};
    cases.push_back({c, {false, false, true}});  // (F,F,T): all clauses hold
  }
  for (const auto& [cnf, assignment] : cases) {
    auto red = sat_to_rev(cnf);
    auto theta = assignment_to_equilibrium(cnf, assignment);
    CHECK(verify_equilibrium(red.game, theta, 0.0, AuctionFormat::SecondPrice)
              .accepted);
    auto report = expected_payments_sp(red.game, theta);
    CHECK(report.revenue ==
          doctest::Approx(red.target_revenue).epsilon(1e-12));
  }
}

TEST_CASE("unsatisfiable formulas stay below the target on the grid") {
  CnfFormula cnf;  // (x1) and (not x1)
  cnf.var_count = 1;
  cnf.clauses = {{1}, {-1}};
  auto red = sat_to_rev(cnf);
  for (double delta : {0.1, 0.3}) {
    GridOracleConfig cfg;
    cfg.step = 1.0 / 8.0;
    cfg.delta = delta;
    auto hits = brute_force_equilibria(red.game, cfg, AuctionFormat::SecondPrice);
    CHECK(!hits.empty());
    for (const auto& h : hits) {
      auto report = expected_payments_sp(red.game, h);
      CHECK(report.revenue < red.target_revenue - 1e-6);
    }
  }
}
