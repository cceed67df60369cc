#include "teq/fp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "teq/kernels.hpp"
#include "teq/payments.hpp"

namespace teq {

double initialization_floor(const ThrottlingGame& game) {
  double c = 1.0;
  for (int i = 0; i < game.n; ++i) {
    if (game.budgets[i].is_unbounded()) continue;
    double row = 0.0;
    for (int j = 0; j < game.m; ++j) row += game.bid(i, j);
    if (row > 0.0)
      c = std::min(c, std::min(game.budgets[i].amount() / (2.0 * row), 1.0));
  }
  return c;
}

std::pair<ThrottleProfile, DynamicsTrace> solve_fp_throttling(
    const ThrottlingGame& game, double delta, bool record_trace) {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("delta must lie in (0, 1/2)");
  if (game.n < 1) throw std::invalid_argument("empty game");

  PreparedGame pg(game);
  ThrottleProfile theta(game.n, 1.0);
  for (int i = 0; i < game.n; ++i) {
    if (game.budgets[i].is_unbounded()) continue;
    double row = 0.0;
    for (int j = 0; j < game.m; ++j) row += game.bid(i, j);
    if (row > 0.0)  // all-zero rows never spend and stay pinned at 1
      theta[i] = std::min(game.budgets[i].amount() / (2.0 * row), 1.0);
  }

  const double c = initialization_floor(game);
  const long max_rounds =
      static_cast<long>(std::ceil(game.n * std::log(1.0 / c) / delta)) + 1;

  DynamicsTrace trace;
  for (long round = 0;; ++round) {
    auto spends = fp_spend(pg, theta);
    bool any = false;
    for (int i = 0; i < game.n; ++i) {
      if (theta[i] >= 1.0 - delta) continue;
      const bool under = game.budgets[i].is_unbounded() ||
                         spends[i] < (1.0 - delta) * game.budgets[i].amount();
      if (under) {
        theta[i] /= 1.0 - delta;
        any = true;
      }
    }
    if (!any) {
      trace.terminal = theta;
      return {theta, trace};
    }
    if (round >= max_rounds)
      throw std::runtime_error("tatonnement exceeded its iteration bound");
    ++trace.iterations;
    if (record_trace) trace.per_round.push_back({theta, fp_spend(pg, theta)});
  }
}

namespace {

// Largest alpha in [0,1] keeping buyer i within budget when rivals' paced
// bids are fixed, allowing a fractional award exactly at a tie threshold.
double pacing_best_response(const ThrottlingGame& game,
                            const std::vector<double>& alpha, int i) {
  if (game.budgets[i].is_unbounded()) return 1.0;
  const double budget = game.budgets[i].amount();

  // Threshold per good: the alpha at which buyer i's paced bid matches the
  // best rival paced bid. Strictly above it she wins the good outright.
  std::vector<std::pair<double, double>> items;  // (threshold, b_ij)
  for (int j = 0; j < game.m; ++j) {
    const double b = game.bid(i, j);
    if (b <= 0.0) continue;
    double rival = 0.0;
    for (int k = 0; k < game.n; ++k)
      if (k != i && game.bid(k, j) > 0.0)
        rival = std::max(rival, alpha[k] * game.bid(k, j));
    items.emplace_back(rival / b, b);
  }
  if (items.empty()) return 1.0;
  std::sort(items.begin(), items.end());

  // Scan candidate intervals (t_k, t_{k+1}] from the top; below every
  // threshold the spend is zero, so the scan always terminates.
  std::vector<double> cum(items.size() + 1, 0.0);  // bids with threshold <= t_k
  for (size_t k = 0; k < items.size(); ++k)
    cum[k + 1] = cum[k] + items[k].second;
  double upper = 1.0;
  for (size_t k = items.size(); k-- > 0;) {
    const double t = items[k].first;
    if (k > 0 && items[k - 1].first == t) continue;  // group equal thresholds
    if (t < upper) {
      const double won = cum[k + 1];
      if (won <= 0.0) return upper;
      const double cand = budget / won;
      if (cand > t) return std::min(cand, upper);
    }
    // Interval infeasible; exact tie point with a fractional split.
    double strictly_below = 0.0;
    for (size_t v = 0; v < items.size() && items[v].first < t; ++v)
      strictly_below += items[v].second;
    if (t <= 1.0 && t * strictly_below <= budget) return t;
    upper = std::min(upper, t);
  }
  // Every win threshold exceeds 1: the buyer loses everything at any level,
  // so no pacing is needed.
  return 1.0;
}

// Dense max-flow (Edmonds-Karp); node count is O(n + m), so simplicity wins.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : n_(nodes), cap_(nodes, std::vector<double>(nodes, 0.0)) {}
  void add(int u, int v, double c) { cap_[u][v] += c; }
  double flow_on(int u, int v) const { return flow_[u][v]; }
  double run(int s, int t) {
    flow_.assign(n_, std::vector<double>(n_, 0.0));
    double total = 0.0;
    for (;;) {
      std::vector<int> prev(n_, -1);
      prev[s] = s;
      std::vector<int> queue = {s};
      for (size_t q = 0; q < queue.size() && prev[t] < 0; ++q) {
        const int u = queue[q];
        for (int v = 0; v < n_; ++v)
          if (prev[v] < 0 && cap_[u][v] - flow_[u][v] > 1e-12) {
            prev[v] = u;
            queue.push_back(v);
          }
      }
      if (prev[t] < 0) return total;
      double aug = std::numeric_limits<double>::infinity();
      for (int v = t; v != s; v = prev[v])
        aug = std::min(aug, cap_[prev[v]][v] - flow_[prev[v]][v]);
      for (int v = t; v != s; v = prev[v]) {
        flow_[prev[v]][v] += aug;
        flow_[v][prev[v]] -= aug;
      }
      total += aug;
    }
  }

 private:
  int n_;
  std::vector<std::vector<double>> cap_;
  std::vector<std::vector<double>> flow_;
};

// Supporting allocation for a pacing vector: goods go to (near-)maximal paced
// bids, budget-bound buyers (alpha interior) must spend their full budget, and
// everyone stays within budget. Expressed as a feasible flow of money from
// goods to buyers with lower bounds handled by the standard super-source
// transform. Falls back to a greedy priority fill if the flow is infeasible.
Allocation pacing_allocation(const ThrottlingGame& game,
                             const std::vector<double>& alpha) {
  const double win_tol = 1e-7;
  Allocation alloc;
  alloc.y.assign(static_cast<size_t>(game.n) * game.m, 0.0);

  std::vector<double> price(game.m, 0.0);
  for (int j = 0; j < game.m; ++j)
    for (int i = 0; i < game.n; ++i)
      if (game.bid(i, j) > 0.0)
        price[j] = std::max(price[j], alpha[i] * game.bid(i, j));

  // Nodes: 0 = source, 1 = sink, 2+j = good j, 2+m+i = buyer i, then the
  // super source/sink for the lower-bound transform.
  const int S = 2 + game.m + game.n, T = S + 1;
  MaxFlow net(T + 1);
  std::vector<double> excess(T + 1, 0.0);
  double big = 1.0;
  for (int j = 0; j < game.m; ++j) big += price[j];
  auto add_edge = [&](int u, int v, double lo, double hi) {
    net.add(u, v, hi - lo);
    excess[v] += lo;
    excess[u] -= lo;
  };

  for (int j = 0; j < game.m; ++j) {
    if (price[j] <= 0.0) continue;
    add_edge(0, 2 + j, price[j], price[j]);  // goods must sell fully
    for (int i = 0; i < game.n; ++i)
      if (game.bid(i, j) > 0.0 &&
          alpha[i] * game.bid(i, j) >= price[j] * (1.0 - win_tol))
        add_edge(2 + j, 2 + game.m + i, 0.0, big);
  }
  for (int i = 0; i < game.n; ++i) {
    if (game.budgets[i].is_unbounded()) {
      add_edge(2 + game.m + i, 1, 0.0, big);
      continue;
    }
    const double B = game.budgets[i].amount();
    const double lo =
        alpha[i] < 1.0 - win_tol ? std::max(0.0, B - 1e-7 * (1.0 + B)) : 0.0;
    add_edge(2 + game.m + i, 1, lo, B);
  }
  add_edge(1, 0, 0.0, big);

  double need = 0.0;
  for (int v = 0; v <= T; ++v)
    if (excess[v] > 0.0) {
      net.add(S, v, excess[v]);
      need += excess[v];
    } else if (excess[v] < 0.0) {
      net.add(v, T, -excess[v]);
    }
  const bool feasible = net.run(S, T) >= need - 1e-9 * (1.0 + need);

  if (feasible) {
    for (int j = 0; j < game.m; ++j) {
      if (price[j] <= 0.0) continue;
      for (int i = 0; i < game.n; ++i) {
        const double money = net.flow_on(2 + j, 2 + game.m + i);
        if (money > 0.0)
          alloc.y[static_cast<size_t>(i) * game.m + j] = money / price[j];
      }
    }
    return alloc;
  }

  // Greedy fallback: budgeted tie winners by priority, slack partners absorb.
  std::vector<double> spent(game.n, 0.0);
  for (int j = 0; j < game.m; ++j) {
    if (price[j] <= 0.0) continue;
    std::vector<int> winners;
    for (int i = 0; i < game.n; ++i)
      if (game.bid(i, j) > 0.0 &&
          alpha[i] * game.bid(i, j) >= price[j] * (1.0 - win_tol))
        winners.push_back(i);
    std::sort(winners.begin(), winners.end(), [&](int a, int b) {
      return game.priority_rank(j, a) < game.priority_rank(j, b);
    });
    double remaining = 1.0;
    for (int i : winners) {
      if (remaining <= 0.0) break;
      double want = remaining;
      if (!game.budgets[i].is_unbounded())
        want = std::min(
            want, std::max(0.0, (game.budgets[i].amount() - spent[i]) / price[j]));
      alloc.y[static_cast<size_t>(i) * game.m + j] += want;
      spent[i] += want * price[j];
      remaining -= want;
    }
    if (remaining > 0.0 && !winners.empty())
      alloc.y[static_cast<size_t>(winners.front()) * game.m + j] += remaining;
  }
  return alloc;
}

// The pacing equilibrium is the minimizer of the convex function
//   F(alpha) = sum_j max_i b_ij alpha_i  -  sum_i B_i log alpha_i
// over (0,1]^n (buyers with unbounded budgets or no bids pinned at 1).
// Iterated best responses can stall where tied buyers cannot jointly afford a
// good; this refiner minimizes F directly, smoothing each max with a
// log-sum-exp at temperature tau and annealing tau down, using damped Newton
// steps (the dimension is tiny).
std::vector<double> eg_refine(const ThrottlingGame& game,
                              std::vector<double> alpha) {
  std::vector<int> free_ix;
  for (int i = 0; i < game.n; ++i) {
    if (game.budgets[i].is_unbounded()) {
      alpha[i] = 1.0;
      continue;
    }
    double row = 0.0;
    for (int j = 0; j < game.m; ++j) row += game.bid(i, j);
    if (row > 0.0) {
      free_ix.push_back(i);
      alpha[i] = std::min(1.0, std::max(alpha[i], 0.1));  // keep log finite
    } else {
      alpha[i] = 1.0;
    }
  }
  const int d = static_cast<int>(free_ix.size());
  if (d == 0) return alpha;
  std::vector<int> slot(game.n, -1);
  for (int k = 0; k < d; ++k) slot[free_ix[k]] = k;

  auto evaluate = [&](const std::vector<double>& a, double tau, double* grad,
                      std::vector<std::vector<double>>* hess) {
    double val = 0.0;
    if (grad) std::fill(grad, grad + d, 0.0);
    if (hess)
      for (auto& row : *hess) std::fill(row.begin(), row.end(), 0.0);
    for (int j = 0; j < game.m; ++j) {
      std::vector<std::pair<int, double>> terms;  // (slot or -1, paced bid)
      for (int i = 0; i < game.n; ++i)
        if (game.bid(i, j) > 0.0)
          terms.emplace_back(slot[i], a[i] * game.bid(i, j));
      if (terms.empty()) continue;
      double peak = 0.0;
      for (auto& [s, v] : terms) peak = std::max(peak, v);
      double z = 0.0;
      for (auto& [s, v] : terms) z += std::exp((v - peak) / tau);
      val += peak + tau * std::log(z);
      if (!grad) continue;
      std::vector<double> sb(d, 0.0);  // sigma_i * b_ij over free slots
      for (auto& [s, v] : terms) {
        if (s < 0) continue;
        const double sigma = std::exp((v - peak) / tau) / z;
        const double b = game.bid(free_ix[s], j);
        grad[s] += sigma * b;
        sb[s] += sigma * b;
        if (hess) (*hess)[s][s] += sigma * b * b / tau;
      }
      if (hess)
        for (int p = 0; p < d; ++p)
          for (int q = 0; q < d; ++q) (*hess)[p][q] -= sb[p] * sb[q] / tau;
    }
    for (int k = 0; k < d; ++k) {
      const double B = game.budgets[free_ix[k]].amount();
      const double x = a[free_ix[k]];
      val -= B * std::log(x);
      if (grad) grad[k] -= B / x;
      if (hess) (*hess)[k][k] += B / (x * x);
    }
    return val;
  };

  for (double tau = 1e-2; tau >= 0.5e-10; tau *= 0.1) {
    std::vector<double> grad(d);
    std::vector<std::vector<double>> hess(d, std::vector<double>(d));
    for (int iter = 0; iter < 200; ++iter) {
      const double f0 = evaluate(alpha, tau, grad.data(), &hess);
      // Coordinates pinned at the cap with inward-pointing gradient stay put.
      std::vector<int> active(d, 0);
      double gnorm = 0.0;
      for (int k = 0; k < d; ++k) {
        if (alpha[free_ix[k]] >= 1.0 && grad[k] < 0.0)
          active[k] = 1;
        else
          gnorm = std::max(gnorm, std::abs(grad[k]));
      }
      if (gnorm <= 1e-12 * (1.0 + std::abs(f0))) break;
      // Solve H step = -grad on the free coordinates (partial pivoting).
      std::vector<std::vector<double>> A = hess;
      std::vector<double> rhs(d);
      for (int k = 0; k < d; ++k) {
        rhs[k] = active[k] ? 0.0 : -grad[k];
        if (active[k]) {
          for (int q = 0; q < d; ++q) A[k][q] = A[q][k] = 0.0;
          A[k][k] = 1.0;
        }
      }
      for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
          if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        std::swap(rhs[c], rhs[piv]);
        if (std::abs(A[c][c]) < 1e-300) {
          A[c][c] = 1.0;
          rhs[c] = 0.0;
        }
        for (int r = c + 1; r < d; ++r) {
          const double f = A[r][c] / A[c][c];
          for (int q = c; q < d; ++q) A[r][q] -= f * A[c][q];
          rhs[r] -= f * rhs[c];
        }
      }
      std::vector<double> step(d);
      for (int c = d; c-- > 0;) {
        double s = rhs[c];
        for (int q = c + 1; q < d; ++q) s -= A[c][q] * step[q];
        step[c] = s / A[c][c];
      }
      double t = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt, t *= 0.5) {
        std::vector<double> trial = alpha;
        for (int k = 0; k < d; ++k)
          trial[free_ix[k]] = std::min(
              1.0, std::max(1e-14, alpha[free_ix[k]] + t * step[k]));
        if (evaluate(trial, tau, nullptr, nullptr) < f0) {
          alpha = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
  }
  return alpha;
}

}  // namespace

std::vector<double> pacing_prices(const ThrottlingGame& game,
                                  const std::vector<double>& alpha,
                                  AuctionFormat format) {
  std::vector<double> prices(game.m, 0.0);
  for (int j = 0; j < game.m; ++j) {
    double top = 0.0, second = 0.0;
    for (int i = 0; i < game.n; ++i) {
      if (game.bid(i, j) <= 0.0) continue;
      const double paced = alpha[i] * game.bid(i, j);
      if (paced > top) {
        second = top;
        top = paced;
      } else {
        second = std::max(second, paced);
      }
    }
    prices[j] = format == AuctionFormat::FirstPrice ? top : second;
  }
  return prices;
}

PacingProfile solve_fp_pacing(const ThrottlingGame& game, double delta) {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("delta must lie in (0, 1/2)");

  std::vector<double> alpha(game.n, 1.0);
  const int max_rounds = 1000 + 50 * game.n;
  for (int round = 0; round < max_rounds; ++round) {
    double change = 0.0;
    for (int i = 0; i < game.n; ++i) {
      const double next = pacing_best_response(game, alpha, i);
      change = std::max(change, std::abs(next - alpha[i]));
      alpha[i] = next;
    }
    if (change < 1e-13) break;
  }

  PacingProfile out;
  out.alpha = alpha;
  out.allocation = pacing_allocation(game, alpha);
  if (verify_pacing_equilibrium(game, out, delta, AuctionFormat::FirstPrice,
                                1e-7)
          .accepted)
    return out;

  // Best responses stalled on a degenerate tie (tied buyers who cannot
  // jointly afford a good); minimize the underlying convex objective instead.
  out.alpha = eg_refine(game, alpha);
  out.allocation = pacing_allocation(game, out.alpha);
  return out;
}

EquilibriumCertificate verify_pacing_equilibrium(const ThrottlingGame& game,
                                                 const PacingProfile& pacing,
                                                 double delta,
                                                 AuctionFormat format,
                                                 double tolerance) {
  if (!(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("delta must lie in [0,1)");
  if (pacing.alpha.size() != static_cast<size_t>(game.n) ||
      pacing.allocation.y.size() != static_cast<size_t>(game.n) * game.m)
    throw std::invalid_argument("pacing profile dimension mismatch");

  EquilibriumCertificate cert;
  cert.delta = delta;
  cert.format = format;

  auto prices = pacing_prices(game, pacing.alpha, format);
  std::vector<double> top(game.m, 0.0);
  for (int j = 0; j < game.m; ++j)
    for (int i = 0; i < game.n; ++i)
      if (game.bid(i, j) > 0.0)
        top[j] = std::max(top[j], pacing.alpha[i] * game.bid(i, j));

  // (a) winners bid maximally; (b) positive-bid goods fully allocated.
  for (int j = 0; j < game.m; ++j) {
    double total = 0.0;
    int top_buyer = -1;
    double top_paced = -1.0;
    for (int i = 0; i < game.n; ++i) {
      const double x = pacing.allocation.at(i, j, game.m);
      total += x;
      if (game.bid(i, j) > 0.0) {
        const double paced = pacing.alpha[i] * game.bid(i, j);
        if (paced > top_paced ||
            (paced == top_paced &&
             game.priority_rank(j, i) < game.priority_rank(j, top_buyer))) {
          top_paced = paced;
          top_buyer = i;
        }
      }
      if (x > tolerance &&
          pacing.alpha[i] * game.bid(i, j) < top[j] - tolerance)
        cert.violations.push_back(
            {i, ViolationKind::AllocationToNonWinner,
             top[j] - pacing.alpha[i] * game.bid(i, j)});
    }
    if (top[j] > 0.0 && std::abs(total - 1.0) > 1e-9)
      cert.violations.push_back(
          {top_buyer, ViolationKind::IncompleteAllocation,
           std::abs(total - 1.0)});
  }

  // (c) budgets at the pacing prices; (d) no unnecessary pacing at level
  // delta.
  std::vector<double> spends(game.n, 0.0);
  for (int i = 0; i < game.n; ++i)
    for (int j = 0; j < game.m; ++j)
      spends[i] += pacing.allocation.at(i, j, game.m) * prices[j];
  cert.per_buyer_spend = spends;
  for (int i = 0; i < game.n; ++i) {
    const bool unbounded = game.budgets[i].is_unbounded();
    if (!unbounded && spends[i] > game.budgets[i].amount() + tolerance) {
      cert.violations.push_back({i, ViolationKind::BudgetViolated,
                                 spends[i] - game.budgets[i].amount()});
      continue;
    }
    const bool slack = unbounded || spends[i] < (1.0 - delta) *
                                                    game.budgets[i].amount() -
                                                    tolerance;
    if (slack && pacing.alpha[i] < 1.0 - delta - tolerance)
      cert.violations.push_back({i, ViolationKind::UnnecessaryThrottling,
                                 (1.0 - delta) - pacing.alpha[i]});
  }
  cert.accepted = cert.violations.empty();
  return cert;
}

}  // namespace teq
