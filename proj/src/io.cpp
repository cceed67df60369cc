#include "teq/io.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "teq/payments.hpp"

namespace teq {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

double number_at(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x))
    fail(path, "non-finite numbers are not accepted (use \"inf\" for budgets)");
  return x;
}

int count_at(const json& doc, const std::string& field) {
  if (!doc.contains(field)) fail(field, "missing required field");
  const json& v = doc[field];
  if (!v.is_number_integer() || v.get<long long>() < 1)
    fail(field, "expected a positive integer");
  return v.get<int>();
}

std::vector<double> matrix_at(const json& doc, const std::string& field, int n,
                              int m) {
  const json& rows = doc[field];
  if (!rows.is_array() || rows.size() != static_cast<size_t>(n))
    fail(field, "expected " + std::to_string(n) + " rows");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    const json& row = rows[static_cast<size_t>(i)];
    const std::string rpath = field + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != static_cast<size_t>(m))
      fail(rpath, "expected " + std::to_string(m) + " entries");
    for (int j = 0; j < m; ++j)
      out.push_back(number_at(row[static_cast<size_t>(j)],
                              rpath + "[" + std::to_string(j) + "]"));
  }
  return out;
}

json matrix_to_json(const std::vector<double>& flat, int n, int m) {
  json rows = json::array();
  for (int i = 0; i < n; ++i) {
    json row = json::array();
    for (int j = 0; j < m; ++j) row.push_back(flat[static_cast<size_t>(i) * m + j]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<Budget> budgets_at(const json& doc, int n) {
  if (!doc.contains("budgets")) fail("budgets", "missing required field");
  const json& arr = doc["budgets"];
  if (!arr.is_array() || arr.size() != static_cast<size_t>(n))
    fail("budgets", "expected " + std::to_string(n) + " entries");
  std::vector<Budget> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const json& v = arr[static_cast<size_t>(i)];
    const std::string path = "budgets[" + std::to_string(i) + "]";
    if (v.is_string()) {
      if (v.get<std::string>() != "inf")
        fail(path, "the only string budget accepted is \"inf\"");
      out.push_back(Budget::unbounded());
    } else {
      const double b = number_at(v, path);
      if (!(b > 0.0)) fail(path, "finite budgets must be positive");
      out.push_back(Budget::finite(b));
    }
  }
  return out;
}

}  // namespace

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return doc;
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  out << doc.dump(2) << "\n";
}

LoadedGame game_from_json(const json& doc) {
  if (!doc.is_object()) fail("$", "expected a JSON object");
  const int n = count_at(doc, "n");
  const int m = count_at(doc, "m");
  const bool has_raw = doc.contains("raw_bids") || doc.contains("good_probs");
  LoadedGame out;
  std::vector<double> bids;
  if (has_raw) {
    if (doc.contains("bids"))
      fail("bids", "cannot be combined with raw_bids/good_probs");
    if (!doc.contains("raw_bids") || !doc.contains("good_probs"))
      fail("raw_bids", "raw_bids and good_probs must appear together");
    RawMarket market;
    market.n = n;
    market.m = m;
    market.raw_bids = matrix_at(doc, "raw_bids", n, m);
    const json& probs = doc["good_probs"];
    if (!probs.is_array() || probs.size() != static_cast<size_t>(m))
      fail("good_probs", "expected " + std::to_string(m) + " entries");
    for (int j = 0; j < m; ++j)
      market.good_probs.push_back(number_at(
          probs[static_cast<size_t>(j)], "good_probs[" + std::to_string(j) + "]"));
    market.validate();
    bids = rescale_bids(market);
    out.market = std::move(market);
  } else {
    if (!doc.contains("bids")) fail("bids", "missing required field");
    bids = matrix_at(doc, "bids", n, m);
  }
  std::vector<std::vector<int>> priority;
  if (doc.contains("priority")) {
    const json& pr = doc["priority"];
    if (!pr.is_array() || pr.size() != static_cast<size_t>(m))
      fail("priority", "expected one order per good (" + std::to_string(m) + ")");
    for (int j = 0; j < m; ++j) {
      const json& ord = pr[static_cast<size_t>(j)];
      const std::string path = "priority[" + std::to_string(j) + "]";
      if (!ord.is_array() || ord.size() != static_cast<size_t>(n))
        fail(path, "expected a permutation of all " + std::to_string(n) +
                       " buyers");
      std::vector<int> v;
      for (const json& e : ord) {
        if (!e.is_number_integer()) fail(path, "expected integer buyer indices");
        v.push_back(e.get<int>());
      }
      priority.push_back(std::move(v));
    }
  }
  try {
    out.game = make_game(n, m, std::move(bids), budgets_at(doc, n),
                         std::move(priority));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(e.what());
  }
  return out;
}

json game_to_json(const ThrottlingGame& game) {
  json doc;
  doc["n"] = game.n;
  doc["m"] = game.m;
  doc["bids"] = matrix_to_json(game.bids, game.n, game.m);
  json budgets = json::array();
  for (const auto& b : game.budgets) {
    if (b.is_unbounded())
      budgets.push_back("inf");
    else
      budgets.push_back(b.amount());
  }
  doc["budgets"] = std::move(budgets);
  if (!game.priority.empty()) doc["priority"] = game.priority;
  return doc;
}

RawMarket market_from_json(const json& doc) {
  LoadedGame loaded = game_from_json(doc);
  if (!loaded.market)
    fail("raw_bids", "market document requires raw_bids and good_probs");
  return *loaded.market;
}

json market_to_json(const RawMarket& market) {
  json doc;
  doc["n"] = market.n;
  doc["m"] = market.m;
  doc["good_probs"] = market.good_probs;
  doc["raw_bids"] = matrix_to_json(market.raw_bids, market.n, market.m);
  return doc;
}

ThrottleProfile profile_from_json(const json& doc, int expected_n) {
  const json& arr = doc.is_object() && doc.contains("theta") ? doc["theta"] : doc;
  if (!arr.is_array()) fail("theta", "expected an array of probabilities");
  ThrottleProfile theta;
  for (size_t i = 0; i < arr.size(); ++i) {
    const double t =
        number_at(arr[i], "theta[" + std::to_string(i) + "]");
    if (t < 0.0 || t > 1.0)
      fail("theta[" + std::to_string(i) + "]", "must lie in [0,1]");
    theta.push_back(t);
  }
  if (expected_n >= 0 && theta.size() != static_cast<size_t>(expected_n))
    fail("theta", "expected " + std::to_string(expected_n) + " entries");
  return theta;
}

json profile_to_json(const ThrottleProfile& theta) {
  return json{{"theta", theta}};
}

std::vector<double> vector_from_json(const json& doc, const std::string& field) {
  const json& arr = doc.is_object() && doc.contains(field) ? doc[field] : doc;
  if (!arr.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < arr.size(); ++i)
    out.push_back(number_at(arr[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

json payment_report_to_json(const PaymentReport& report, int n, int m) {
  return json{{"per_pair", matrix_to_json(report.per_pair, n, m)},
              {"per_buyer", report.per_buyer},
              {"revenue", report.revenue}};
}

json certificate_to_json(const EquilibriumCertificate& cert) {
  json violations = json::array();
  for (const auto& v : cert.violations) {
    const char* kind = nullptr;
    switch (v.kind) {
      case ViolationKind::BudgetViolated: kind = "BudgetViolated"; break;
      case ViolationKind::UnnecessaryThrottling:
        kind = "UnnecessaryThrottling";
        break;
      case ViolationKind::AllocationToNonWinner:
        kind = "AllocationToNonWinner";
        break;
      case ViolationKind::IncompleteAllocation:
        kind = "IncompleteAllocation";
        break;
    }
    violations.push_back(
        {{"buyer", v.buyer}, {"kind", kind}, {"magnitude", v.magnitude}});
  }
  return json{{"delta", cert.delta},
              {"format", to_string(cert.format)},
              {"per_buyer_spend", cert.per_buyer_spend},
              {"verdict", cert.accepted ? "Accept" : "Reject"},
              {"violations", std::move(violations)}};
}

json trace_to_json(const DynamicsTrace& trace) {
  json rounds = json::array();
  for (const auto& r : trace.per_round)
    rounds.push_back(
        {{"theta", r.profile}, {"per_buyer_spend", r.per_buyer_spend}});
  return json{{"iterations", trace.iterations},
              {"rounds", std::move(rounds)},
              {"terminal", trace.terminal}};
}

json allocation_to_json(const Allocation& alloc, int n, int m) {
  return json{{"y", matrix_to_json(alloc.y, n, m)}};
}

json pacing_to_json(const PacingProfile& pacing, int n, int m) {
  return json{{"alpha", pacing.alpha},
              {"allocation", allocation_to_json(pacing.allocation, n, m)}};
}

json sim_report_to_json(const SimReport& report, int n, int m) {
  return json{
      {"empirical_payments", matrix_to_json(report.empirical_payments, n, m)},
      {"standard_error", matrix_to_json(report.standard_error, n, m)},
      {"empirical_revenue", report.empirical_revenue}};
}

json welfare_report_to_json(const WelfareReport& report, int n, int m) {
  json doc{{"equilibrium_lw", report.equilibrium_lw},
           {"optimal_lw", report.optimal_lw},
           {"is_equilibrium", report.is_equilibrium},
           {"witness_allocation",
            allocation_to_json(report.witness_allocation, n, m)}};
  if (report.ratio_infinite)
    doc["poa_ratio"] = "inf";
  else
    doc["poa_ratio"] = report.poa_ratio;
  return doc;
}

json comparison_report_to_json(const ComparisonReport& report, int n, int m) {
  return json{{"rev_te", report.rev_te},
              {"rev_pe", report.rev_pe},
              {"ratio_te_over_pe", report.ratio_te_over_pe},
              {"ratio_pe_over_te", report.ratio_pe_over_te},
              {"throttling", report.throttling},
              {"pacing", pacing_to_json(report.pacing, n, m)}};
}

ThresholdGame threshold_game_from_json(const json& doc) {
  if (!doc.is_object()) fail("$", "expected a JSON object");
  ThresholdGame tg;
  tg.node_count = count_at(doc, "node_count");
  if (doc.contains("epsilon"))
    tg.epsilon = number_at(doc["epsilon"], "epsilon");
  if (!doc.contains("edges") || !doc["edges"].is_array())
    fail("edges", "expected an array of [from, to] pairs");
  size_t k = 0;
  for (const json& e : doc["edges"]) {
    const std::string path = "edges[" + std::to_string(k++) + "]";
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      fail(path, "expected a [from, to] integer pair");
    tg.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  tg.validate();
  return tg;
}

json threshold_game_to_json(const ThresholdGame& tg) {
  json edges = json::array();
  for (const auto& [from, to] : tg.edges) edges.push_back({from, to});
  return json{{"node_count", tg.node_count},
              {"edges", std::move(edges)},
              {"epsilon", tg.epsilon}};
}

json reduction_mapping_to_json(const ReductionMapping& mapping) {
  json neighbor = json::array();
  for (const auto& per_node : mapping.neighbor_good) {
    json entries = json::array();
    for (const auto& [j, g] : per_node)
      entries.push_back({{"neighbor", j}, {"good", g}});
    neighbor.push_back(std::move(entries));
  }
  return json{{"threshold_buyer", mapping.threshold_buyer},
              {"strategy_buyer", mapping.strategy_buyer},
              {"neighbor_good", std::move(neighbor)},
              {"reciprocal_good", mapping.reciprocal_good},
              {"M", mapping.M},
              {"delta", mapping.delta}};
}

void GeneratorSpec::validate() const {
  if (n < 1 || m < 1)
    throw std::invalid_argument("generator: counts must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("generator: requires lo < hi");
  if (bid_distribution == BidDistribution::LogUniform && !(lo > 0.0))
    throw std::invalid_argument("generator: log-uniform requires lo > 0");
  if (!(budget_tightness > 0.0))
    throw std::invalid_argument("generator: tightness must be positive");
}

ThrottlingGame generate(const GeneratorSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  auto unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  std::vector<double> bids(static_cast<size_t>(spec.n) * spec.m);
  for (double& b : bids) {
    if (spec.bid_distribution == BidDistribution::Uniform) {
      b = spec.lo + (spec.hi - spec.lo) * unit();
    } else {
      const double llo = std::log(spec.lo), lhi = std::log(spec.hi);
      b = std::exp(llo + (lhi - llo) * unit());
    }
  }
  ThrottlingGame probe = make_game(
      spec.n, spec.m, bids,
      std::vector<Budget>(static_cast<size_t>(spec.n), Budget::finite(1.0)));
  PaymentReport at_half = expected_payments_fp(
      probe, ThrottleProfile(static_cast<size_t>(spec.n), 0.5));
  std::vector<Budget> budgets;
  budgets.reserve(static_cast<size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    const double cost = at_half.per_buyer[static_cast<size_t>(i)];
    budgets.push_back(Budget::finite(
        std::max(spec.budget_tightness * cost, 1e-9)));
  }
  return make_game(spec.n, spec.m, std::move(bids), std::move(budgets));
}

}  // namespace teq
