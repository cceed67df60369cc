#include "teq/game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace teq {

bool ThrottlingGame::higher_priority(int j, int i, int k) const {
  if (i == k || i < 0 || k < 0 || i >= n || k >= n || j < 0 || j >= m)
    throw std::invalid_argument("higher_priority: index out of range");
  double bi = bid(i, j), bk = bid(k, j);
  if (bi != bk) return bi > bk;
  return priority_rank(j, i) < priority_rank(j, k);
}

void ThrottlingGame::validate() {
  if (n < 1 || m < 1)
    throw std::invalid_argument("game must have at least one buyer and good");
  if (bids.size() != static_cast<size_t>(n) * m)
    throw std::invalid_argument("bids: expected " + std::to_string(n) + "x" +
                                std::to_string(m) + " matrix");
  for (size_t k = 0; k < bids.size(); ++k) {
    if (!(bids[k] >= 0.0) || !std::isfinite(bids[k]))
      throw std::invalid_argument("bids[" + std::to_string(k / m) + "][" +
                                  std::to_string(k % m) +
                                  "]: must be a non-negative finite real");
  }
  if (budgets.size() != static_cast<size_t>(n))
    throw std::invalid_argument("budgets: expected length " + std::to_string(n));
  rank_.clear();
  if (!priority.empty()) {
    if (priority.size() != static_cast<size_t>(m))
      throw std::invalid_argument("priority: expected one order per good");
    rank_.assign(static_cast<size_t>(m) * n, -1);
    for (int j = 0; j < m; ++j) {
      if (priority[j].size() != static_cast<size_t>(n))
        throw std::invalid_argument("priority[" + std::to_string(j) +
                                    "]: expected a permutation of all buyers");
      for (int pos = 0; pos < n; ++pos) {
        int i = priority[j][pos];
        if (i < 0 || i >= n || rank_[static_cast<size_t>(j) * n + i] != -1)
          throw std::invalid_argument("priority[" + std::to_string(j) +
                                      "]: not a permutation of buyer indices");
        rank_[static_cast<size_t>(j) * n + i] = pos;
      }
    }
  }
}

ThrottlingGame make_game(int n, int m, std::vector<double> bids,
                         std::vector<Budget> budgets,
                         std::vector<std::vector<int>> priority) {
  ThrottlingGame g;
  g.n = n;
  g.m = m;
  g.bids = std::move(bids);
  g.budgets = std::move(budgets);
  g.priority = std::move(priority);
  g.validate();
  return g;
}

void RawMarket::validate() const {
  if (n < 1 || m < 1)
    throw std::invalid_argument("market must have at least one buyer and good");
  if (good_probs.size() != static_cast<size_t>(m))
    throw std::invalid_argument("good_probs: expected length " +
                                std::to_string(m));
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    if (!(good_probs[j] >= 0.0))
      throw std::invalid_argument("good_probs[" + std::to_string(j) +
                                  "]: must be non-negative");
    total += good_probs[j];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("good_probs: must sum to 1");
  if (raw_bids.size() != static_cast<size_t>(n) * m)
    throw std::invalid_argument("raw_bids: dimension mismatch");
  for (double b : raw_bids)
    if (!(b >= 0.0) || !std::isfinite(b))
      throw std::invalid_argument("raw_bids: entries must be non-negative");
}

std::vector<double> rescale_bids(const RawMarket& market) {
  market.validate();
  std::vector<double> out(market.raw_bids.size());
  for (int i = 0; i < market.n; ++i)
    for (int j = 0; j < market.m; ++j)
      out[static_cast<size_t>(i) * market.m + j] =
          market.good_probs[j] * market.raw_bid(i, j);
  return out;
}

PreparedGame::PreparedGame(const ThrottlingGame& g) : game(&g) {
  goods.resize(g.m);
  for (int j = 0; j < g.m; ++j) {
    auto& ord = goods[j];
    for (int i = 0; i < g.n; ++i)
      if (g.bid(i, j) > 0.0) ord.buyer.push_back(i);
    std::sort(ord.buyer.begin(), ord.buyer.end(), [&](int a, int b) {
      double ba = g.bid(a, j), bb = g.bid(b, j);
      if (ba != bb) return ba > bb;
      return g.priority_rank(j, a) < g.priority_rank(j, b);
    });
    ord.bid.reserve(ord.buyer.size());
    for (int i : ord.buyer) ord.bid.push_back(g.bid(i, j));
  }
}

}  // namespace teq
