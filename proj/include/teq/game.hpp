#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace teq {

enum class AuctionFormat { FirstPrice, SecondPrice };

inline const char* to_string(AuctionFormat f) {
  return f == AuctionFormat::FirstPrice ? "fp" : "sp";
}

/// Per-auction budget. Unbounded budgets are a distinct state, never a
/// large float: any comparison "spend < (1-delta)*B" against an unbounded
/// budget is unconditionally true.
class Budget {
 public:
  Budget() : amount_(0.0), unbounded_(true) {}

  static Budget finite(double amount) {
    if (!(amount > 0.0) || !std::isfinite(amount))
      throw std::invalid_argument("budget must be a positive finite real");
    Budget b;
    b.amount_ = amount;
    b.unbounded_ = false;
    return b;
  }
  static Budget unbounded() { return Budget(); }

  bool is_unbounded() const { return unbounded_; }
  double amount() const {
    if (unbounded_)
      throw std::logic_error("amount() called on unbounded budget");
    return amount_;
  }

  bool operator==(const Budget& o) const {
    return unbounded_ == o.unbounded_ && (unbounded_ || amount_ == o.amount_);
  }

 private:
  double amount_;
  bool unbounded_;
};

using ThrottleProfile = std::vector<double>;

/// A throttling game: n buyers, m goods, rescaled bids b_ij, budgets, and a
/// per-good tie-break priority over the buyers (default: ascending index).
struct ThrottlingGame {
  int n = 0;
  int m = 0;
  std::vector<double> bids;         // row-major, n x m
  std::vector<Budget> budgets;      // length n
  std::vector<std::vector<int>> priority;  // per good, buyers from highest to
                                           // lowest priority; empty = default

  double bid(int i, int j) const { return bids[static_cast<size_t>(i) * m + j]; }
  double& bid(int i, int j) { return bids[static_cast<size_t>(i) * m + j]; }

  /// Rank of buyer i in good j's priority order (0 = highest). With the
  /// default order this is just i.
  int priority_rank(int j, int i) const {
    return priority.empty() ? i : rank_[static_cast<size_t>(j) * n + i];
  }

  /// The priority-aware strict comparison the payment formulas use: true iff
  /// buyer i beats buyer k on good j (higher bid, or equal bid and higher
  /// priority).
  bool higher_priority(int j, int i, int k) const;

  /// Checks all structural invariants, throws std::invalid_argument on
  /// violation. Must be called after construction and before use of
  /// priority_rank with a custom priority.
  void validate();

 private:
  std::vector<int> rank_;  // m x n, built by validate() from priority
};

ThrottlingGame make_game(int n, int m, std::vector<double> bids,
                         std::vector<Budget> budgets,
                         std::vector<std::vector<int>> priority = {});

/// Good-type distribution plus raw (unscaled) bids.
struct RawMarket {
  std::vector<double> good_probs;  // length m, sums to 1
  std::vector<double> raw_bids;    // row-major, n x m
  int n = 0;
  int m = 0;

  double raw_bid(int i, int j) const {
    return raw_bids[static_cast<size_t>(i) * m + j];
  }
  void validate() const;
};

/// b_ij := d_j * btilde_ij.
std::vector<double> rescale_bids(const RawMarket& market);

struct PaymentReport {
  std::vector<double> per_pair;   // n x m expected payments
  std::vector<double> per_buyer;  // length n
  double revenue = 0.0;

  double pay(int i, int j, int m) const {
    return per_pair[static_cast<size_t>(i) * m + j];
  }
};

struct Allocation {
  std::vector<double> y;  // n x m, column sums <= 1
  double at(int i, int j, int m) const {
    return y[static_cast<size_t>(i) * m + j];
  }
};

enum class ViolationKind {
  BudgetViolated,
  UnnecessaryThrottling,
  // Pacing conditions (a) and (b).
  AllocationToNonWinner,
  IncompleteAllocation,
};

struct Violation {
  int buyer;
  ViolationKind kind;
  double magnitude;
};

struct EquilibriumCertificate {
  double delta = 0.0;
  AuctionFormat format = AuctionFormat::FirstPrice;
  std::vector<double> per_buyer_spend;
  bool accepted = false;
  std::vector<Violation> violations;
};

/// Precomputed per-good view of a game: positive bidders in descending
/// priority-aware order. All payment kernels run off this.
struct PreparedGame {
  struct GoodOrder {
    std::vector<int> buyer;    // descending by (bid, priority)
    std::vector<double> bid;
  };
  const ThrottlingGame* game = nullptr;
  std::vector<GoodOrder> goods;

  explicit PreparedGame(const ThrottlingGame& g);
  int n() const { return game->n; }
  int m() const { return game->m; }
};

inline constexpr double kDefaultTolerance = 1e-9;

}  // namespace teq
