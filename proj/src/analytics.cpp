#include "teq/analytics.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <limits>
#include <stdexcept>
#include <vector>

#include "teq/payments.hpp"

namespace teq {
namespace {

using Rational = boost::multiprecision::cpp_rational;

/// Dense tableau simplex for max c^T x, A x <= b, x >= 0 with b >= 0, in
/// exact rational arithmetic. Bland's rule guarantees termination; the
/// instances here are small (tens to a few thousand variables).
class Simplex {
 public:
  Simplex(int vars, int rows) : vars_(vars), rows_(rows) {
    const int cols = vars_ + rows_ + 1;  // structural + slack + rhs
    tab_.assign(static_cast<size_t>(rows_ + 1) * cols, Rational(0));
    basis_.resize(static_cast<size_t>(rows_));
    for (int r = 0; r < rows_; ++r) {
      at(r, vars_ + r) = 1;
      basis_[static_cast<size_t>(r)] = vars_ + r;
    }
  }

  Rational& at(int r, int c) {
    return tab_[static_cast<size_t>(r) * (vars_ + rows_ + 1) + c];
  }
  Rational& rhs(int r) { return at(r, vars_ + rows_); }
  Rational& obj(int c) { return at(rows_, c); }

  void set_objective_coeff(int var, const Rational& c) { obj(var) = -c; }

  std::vector<Rational> solve() {
    for (;;) {
      int enter = -1;
      for (int c = 0; c < vars_ + rows_; ++c) {
        if (obj(c) < 0) {
          enter = c;
          break;
        }
      }
      if (enter < 0) break;
      int leave = -1;
      Rational best;
      for (int r = 0; r < rows_; ++r) {
        if (at(r, enter) <= 0) continue;
        Rational ratio = rhs(r) / at(r, enter);
        if (leave < 0 || ratio < best ||
            (ratio == best && basis_[static_cast<size_t>(r)] <
                                  basis_[static_cast<size_t>(leave)])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave < 0)
        throw std::runtime_error("liquid-welfare LP is unbounded");
      pivot(leave, enter);
    }
    std::vector<Rational> x(static_cast<size_t>(vars_), Rational(0));
    for (int r = 0; r < rows_; ++r)
      if (basis_[static_cast<size_t>(r)] < vars_)
        x[static_cast<size_t>(basis_[static_cast<size_t>(r)])] = rhs(r);
    return x;
  }

  Rational objective_value() { return rhs(rows_); }

 private:
  void pivot(int leave, int enter) {
    const int cols = vars_ + rows_ + 1;
    const Rational p = at(leave, enter);
    for (int c = 0; c < cols; ++c) at(leave, c) /= p;
    for (int r = 0; r <= rows_; ++r) {
      if (r == leave) continue;
      const Rational f = at(r, enter);
      if (f == 0) continue;
      for (int c = 0; c < cols; ++c) at(r, c) -= f * at(leave, c);
    }
    basis_[static_cast<size_t>(leave)] = enter;
  }

  int vars_;
  int rows_;
  std::vector<Rational> tab_;
  std::vector<int> basis_;
};

}  // namespace

std::pair<double, Allocation> optimal_liquid_welfare(const ThrottlingGame& g) {
  const int n = g.n;
  const int m = g.m;
  // Variables: w_0..w_{n-1}, then y_ij at n + i*m + j.
  const int vars = n + n * m;
  int finite_rows = 0;
  for (const auto& b : g.budgets)
    if (!b.is_unbounded()) ++finite_rows;
  const int rows = n + finite_rows + m;
  Simplex lp(vars, rows);

  int r = 0;
  for (int i = 0; i < n; ++i, ++r) {  // w_i - sum_j b_ij y_ij <= 0
    lp.at(r, i) = 1;
    for (int j = 0; j < m; ++j)
      lp.at(r, n + i * m + j) = -Rational(g.bid(i, j));
    lp.rhs(r) = 0;
  }
  for (int i = 0; i < n; ++i) {  // w_i <= B_i for finite budgets
    if (g.budgets[static_cast<size_t>(i)].is_unbounded()) continue;
    lp.at(r, i) = 1;
    lp.rhs(r) = Rational(g.budgets[static_cast<size_t>(i)].amount());
    ++r;
  }
  for (int j = 0; j < m; ++j, ++r) {  // sum_i y_ij <= 1
    for (int i = 0; i < n; ++i) lp.at(r, n + i * m + j) = 1;
    lp.rhs(r) = 1;
  }
  for (int i = 0; i < n; ++i) lp.set_objective_coeff(i, 1);

  auto x = lp.solve();
  Allocation alloc;
  alloc.y.resize(static_cast<size_t>(n) * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      alloc.y[static_cast<size_t>(i) * m + j] =
          x[static_cast<size_t>(n + i * m + j)].convert_to<double>();
  return {lp.objective_value().convert_to<double>(), std::move(alloc)};
}

WelfareReport poa_ratio(const ThrottlingGame& game, const ThrottleProfile& theta,
                        AuctionFormat format, double tolerance) {
  WelfareReport rep;
  rep.is_equilibrium =
      verify_equilibrium(game, theta, 0.0, format, tolerance).accepted;
  rep.equilibrium_lw = liquid_welfare(game, expected_allocation(game, theta));
  auto [opt, witness] = optimal_liquid_welfare(game);
  rep.optimal_lw = opt;
  rep.witness_allocation = std::move(witness);
  if (rep.equilibrium_lw > 0.0) {
    rep.poa_ratio = rep.optimal_lw / rep.equilibrium_lw;
  } else if (rep.optimal_lw > 0.0) {
    rep.ratio_infinite = true;
    rep.poa_ratio = std::numeric_limits<double>::infinity();
  } else {
    rep.poa_ratio = 1.0;
  }
  return rep;
}

ComparisonReport revenue_comparison_fp(const ThrottlingGame& game,
                                       double delta) {
  ComparisonReport rep;
  rep.throttling = solve_fp_throttling(game, delta, false).first;
  rep.pacing = solve_fp_pacing(game, delta);
  rep.rev_te =
      expected_payments_fp(game, rep.throttling).revenue;
  auto prices = pacing_prices(game, rep.pacing.alpha, AuctionFormat::FirstPrice);
  double rev_pe = 0.0;
  for (int j = 0; j < game.m; ++j) {
    double sold = 0.0;
    for (int i = 0; i < game.n; ++i)
      sold += rep.pacing.allocation.at(i, j, game.m);
    rev_pe += sold * prices[static_cast<size_t>(j)];
  }
  rep.rev_pe = rev_pe;
  const double inf = std::numeric_limits<double>::infinity();
  rep.ratio_te_over_pe = rep.rev_pe > 0.0 ? rep.rev_te / rep.rev_pe
                         : rep.rev_te > 0.0 ? inf
                                            : 1.0;
  rep.ratio_pe_over_te = rep.rev_te > 0.0 ? rep.rev_pe / rep.rev_te
                         : rep.rev_pe > 0.0 ? inf
                                            : 1.0;
  return rep;
}

ThrottlingGame poa_example_sp(int m, double eps) {
  if (m < 1) throw std::invalid_argument("poa_example_sp: m must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("poa_example_sp: eps must be > 0");
  const int n = m + 1;
  std::vector<double> bids(static_cast<size_t>(n) * m, 0.0);
  for (int i = 0; i < m; ++i) bids[static_cast<size_t>(i) * m + i] = 1.0;
  for (int j = 0; j < m; ++j)
    bids[static_cast<size_t>(m) * m + j] = static_cast<double>(m);
  std::vector<Budget> budgets(static_cast<size_t>(m), Budget::unbounded());
  budgets.push_back(Budget::finite(m + eps));
  return make_game(n, m, std::move(bids), std::move(budgets));
}

ThrottlingGame poa_example_fp(int m) {
  if (m < 1) throw std::invalid_argument("poa_example_fp: m must be >= 1");
  const int n = m + 1;
  const int goods = m + 1;
  std::vector<double> bids(static_cast<size_t>(n) * goods, 0.0);
  for (int i = 0; i < m; ++i) {
    bids[static_cast<size_t>(i) * goods + i] = 1.0;
    bids[static_cast<size_t>(i) * goods + m] = static_cast<double>(m);
  }
  bids[static_cast<size_t>(m) * goods + m] = static_cast<double>(m);
  std::vector<Budget> budgets(static_cast<size_t>(m), Budget::finite(1.0));
  budgets.push_back(Budget::unbounded());
  return make_game(n, goods, std::move(bids), std::move(budgets));
}

}  // namespace teq
