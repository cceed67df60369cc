#include "teq/reductions.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace teq {

std::vector<std::vector<int>> ThresholdGame::in_neighbors() const {
  std::vector<std::vector<int>> in(static_cast<size_t>(node_count));
  for (const auto& [from, to] : edges) in[static_cast<size_t>(to)].push_back(from);
  for (auto& v : in) std::sort(v.begin(), v.end());
  return in;
}

std::vector<std::vector<int>> ThresholdGame::out_neighbors() const {
  std::vector<std::vector<int>> out(static_cast<size_t>(node_count));
  for (const auto& [from, to] : edges) out[static_cast<size_t>(from)].push_back(to);
  for (auto& v : out) std::sort(v.begin(), v.end());
  return out;
}

void ThresholdGame::validate() const {
  if (node_count <= 0)
    throw std::invalid_argument("threshold game: node_count must be positive");
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("threshold game: epsilon must lie in (0,1)");
  std::vector<int> in_deg(static_cast<size_t>(node_count), 0);
  std::vector<int> out_deg(static_cast<size_t>(node_count), 0);
  for (const auto& [from, to] : edges) {
    if (from < 0 || from >= node_count || to < 0 || to >= node_count)
      throw std::invalid_argument("threshold game: edge endpoint out of range");
    ++out_deg[static_cast<size_t>(from)];
    ++in_deg[static_cast<size_t>(to)];
  }
  for (int i = 0; i < node_count; ++i) {
    if (in_deg[static_cast<size_t>(i)] > 3 || out_deg[static_cast<size_t>(i)] > 3)
      throw std::invalid_argument("threshold game: node " + std::to_string(i) +
                                  " exceeds in/out degree 3");
  }
}

int ReductionMapping::find_neighbor_good(int i, int j) const {
  for (const auto& [nbr, good] : neighbor_good[static_cast<size_t>(i)])
    if (nbr == j) return good;
  throw std::out_of_range("no neighbor good G(" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
}

std::pair<double, double> threshold_reduction_constants(double epsilon) {
  double delta = std::min({epsilon / (3.0 + epsilon), epsilon / 2.0, 0.25});
  return {160.0 / delta, delta};
}

std::pair<ThrottlingGame, ReductionMapping> threshold_to_throttling(
    const ThresholdGame& tg) {
  tg.validate();
  const int nn = tg.node_count;
  auto in = tg.in_neighbors();
  auto out = tg.out_neighbors();
  for (int i = 0; i < nn; ++i) {
    if (out[static_cast<size_t>(i)].empty())
      throw std::invalid_argument(
          "threshold game: node " + std::to_string(i) +
          " has no out-edges; its strategy buyer would get a zero budget");
  }

  ReductionMapping mp;
  auto [M, delta] = threshold_reduction_constants(tg.epsilon);
  mp.M = M;
  mp.delta = delta;
  mp.threshold_buyer.resize(static_cast<size_t>(nn));
  mp.strategy_buyer.resize(static_cast<size_t>(nn));
  mp.neighbor_good.resize(static_cast<size_t>(nn));
  mp.reciprocal_good.resize(static_cast<size_t>(nn));

  int goods = 0;
  for (int i = 0; i < nn; ++i) {
    mp.threshold_buyer[static_cast<size_t>(i)] = 2 * i;
    mp.strategy_buyer[static_cast<size_t>(i)] = 2 * i + 1;
    for (int j : in[static_cast<size_t>(i)])
      mp.neighbor_good[static_cast<size_t>(i)].emplace_back(j, goods++);
    mp.reciprocal_good[static_cast<size_t>(i)] = goods++;
  }

  const int n = 2 * nn;
  const int m = goods;
  std::vector<double> bids(static_cast<size_t>(n) * m, 0.0);
  std::vector<Budget> budgets;
  budgets.reserve(static_cast<size_t>(n));
  auto at = [&](int buyer, int good) -> double& {
    return bids[static_cast<size_t>(buyer) * m + good];
  };
  for (int i = 0; i < nn; ++i) {
    const int T = mp.threshold_buyer[static_cast<size_t>(i)];
    const int S = mp.strategy_buyer[static_cast<size_t>(i)];
    const double deg = static_cast<double>(out[static_cast<size_t>(i)].size());
    for (const auto& [j, g] : mp.neighbor_good[static_cast<size_t>(i)]) {
      at(T, g) = 5.0;
      at(S, g) = 4.0;
      at(mp.strategy_buyer[static_cast<size_t>(j)], g) = 6.0;
    }
    at(T, mp.reciprocal_good[static_cast<size_t>(i)]) = M * deg;
    at(S, mp.reciprocal_good[static_cast<size_t>(i)]) = M * deg + 1.0;
  }
  for (int i = 0; i < nn; ++i) {
    budgets.push_back(Budget::finite(0.5));
    budgets.push_back(Budget::finite(
        mp.M * static_cast<double>(out[static_cast<size_t>(i)].size()) / 2.0));
  }
  return {make_game(n, m, std::move(bids), std::move(budgets)), std::move(mp)};
}

std::vector<double> extract_threshold_strategy(const ThrottleProfile& theta,
                                               const ReductionMapping& mapping) {
  std::vector<double> x;
  x.reserve(mapping.strategy_buyer.size());
  for (int s : mapping.strategy_buyer)
    x.push_back(std::min(2.0 * (1.0 - theta[static_cast<size_t>(s)]), 1.0));
  return x;
}

ThresholdCheck verify_threshold_equilibrium(const ThresholdGame& tg,
                                            const std::vector<double>& x,
                                            double eps) {
  tg.validate();
  if (x.size() != static_cast<size_t>(tg.node_count))
    throw std::invalid_argument("strategy vector length must equal node_count");
  for (double xi : x)
    if (!(xi >= 0.0) || !(xi <= 1.0))
      throw std::invalid_argument("strategy components must lie in [0,1]");
  auto in = tg.in_neighbors();
  ThresholdCheck check;
  for (int i = 0; i < tg.node_count; ++i) {
    double sum = 0.0;
    for (int j : in[static_cast<size_t>(i)]) sum += x[static_cast<size_t>(j)];
    const double xi = x[static_cast<size_t>(i)];
    bool ok = true;
    if (sum > 0.5 + eps)
      ok = xi <= eps;
    else if (sum < 0.5 - eps)
      ok = xi >= 1.0 - eps;
    if (!ok) {
      check.ok = false;
      check.issues.push_back({i, sum, xi});
    }
  }
  return check;
}

void CnfFormula::validate() const {
  if (var_count <= 0)
    throw std::invalid_argument("cnf: var_count must be positive");
  for (const auto& clause : clauses) {
    if (clause.empty()) throw std::invalid_argument("cnf: empty clause");
    if (clause.size() > 3)
      throw std::invalid_argument("cnf: clause with more than 3 literals");
    for (int lit : clause) {
      int v = std::abs(lit);
      if (lit == 0 || v > var_count)
        throw std::invalid_argument("cnf: literal references invalid variable");
    }
  }
}

CnfFormula parse_dimacs(std::istream& in) {
  CnfFormula cnf;
  bool header_seen = false;
  std::string line;
  std::vector<int> clause;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      int n = 0, m = 0;
      if (!(ls >> p >> fmt >> n >> m) || fmt != "cnf")
        throw std::invalid_argument("dimacs: malformed problem line");
      cnf.var_count = n;
      header_seen = true;
      continue;
    }
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (!clause.empty()) {
          cnf.clauses.push_back(clause);
          clause.clear();
        }
      } else {
        clause.push_back(lit);
      }
    }
  }
  if (!clause.empty()) cnf.clauses.push_back(clause);
  if (!header_seen) throw std::invalid_argument("dimacs: missing problem line");
  cnf.validate();
  return cnf;
}

SatReduction sat_to_rev(const CnfFormula& cnf) {
  cnf.validate();
  const int nv = cnf.var_count;
  const int mc = static_cast<int>(cnf.clauses.size());
  SatReduction red;
  red.n_vars_ = nv;

  const int n = 2 * nv + 1;
  const int m = 4 * nv + mc;
  std::vector<double> bids(static_cast<size_t>(n) * m, 0.0);
  auto at = [&](int buyer, int good) -> double& {
    return bids[static_cast<size_t>(buyer) * m + good];
  };
  const int u = n - 1;
  for (int v = 0; v < nv; ++v) {
    at(2 * v, v) = 2.0;            // V_v^+ on A_v
    at(2 * v, nv + v) = 1.0;       // V_v^+ on B_v
    at(2 * v + 1, v) = 1.0;        // V_v^- on A_v
    at(2 * v + 1, nv + v) = 2.0;   // V_v^- on B_v
    at(2 * v, 2 * nv + v) = 1.0;       // V_v^+ on S_v
    at(2 * v + 1, 3 * nv + v) = 1.0;   // V_v^- on T_v
    at(u, 2 * nv + v) = 2.0;
    at(u, 3 * nv + v) = 2.0;
  }
  for (int c = 0; c < mc; ++c) {
    at(u, 4 * nv + c) = 2.0;
    for (int lit : cnf.clauses[static_cast<size_t>(c)]) {
      int v = std::abs(lit) - 1;
      int buyer = lit > 0 ? 2 * v : 2 * v + 1;
      at(buyer, 4 * nv + c) = 1.0;
    }
  }
  std::vector<Budget> budgets(static_cast<size_t>(2 * nv), Budget::finite(0.5));
  budgets.push_back(Budget::unbounded());
  red.game = make_game(n, m, std::move(bids), std::move(budgets));
  red.target_revenue = nv + mc + 1.5 * nv;
  return red;
}

ThrottleProfile assignment_to_equilibrium(const CnfFormula& cnf,
                                          const std::vector<bool>& assignment) {
  cnf.validate();
  if (assignment.size() != static_cast<size_t>(cnf.var_count))
    throw std::invalid_argument("assignment length must equal var_count");
  ThrottleProfile theta;
  theta.reserve(static_cast<size_t>(2 * cnf.var_count + 1));
  for (int v = 0; v < cnf.var_count; ++v) {
    theta.push_back(assignment[static_cast<size_t>(v)] ? 1.0 : 0.5);
    theta.push_back(assignment[static_cast<size_t>(v)] ? 0.5 : 1.0);
  }
  theta.push_back(1.0);
  return theta;
}

}  // namespace teq
