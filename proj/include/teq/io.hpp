#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "teq/analytics.hpp"
#include "teq/fp_solver.hpp"
#include "teq/game.hpp"
#include "teq/reductions.hpp"
#include "teq/sim.hpp"
#include "teq/trace.hpp"

namespace teq {

using json = nlohmann::json;

/// Game document: {"n", "m", "bids": [[...]], "budgets": [number | "inf"],
/// "priority"?: [[...]], "good_probs"?: [...], "raw_bids"?: [[...]]}.
/// good_probs/raw_bids must come together and exclude "bids"; ingestion then
/// rescales. Numeric infinities are rejected everywhere ("inf" string only).
struct LoadedGame {
  ThrottlingGame game;
  std::optional<RawMarket> market;  // present when the document was raw
};

LoadedGame game_from_json(const json& doc);
json game_to_json(const ThrottlingGame& game);

RawMarket market_from_json(const json& doc);
json market_to_json(const RawMarket& market);

ThrottleProfile profile_from_json(const json& doc, int expected_n = -1);
json profile_to_json(const ThrottleProfile& theta);

std::vector<double> vector_from_json(const json& doc, const std::string& field);

json payment_report_to_json(const PaymentReport& report, int n, int m);
json certificate_to_json(const EquilibriumCertificate& cert);
json trace_to_json(const DynamicsTrace& trace);
json allocation_to_json(const Allocation& alloc, int n, int m);
json pacing_to_json(const PacingProfile& pacing, int n, int m);
json sim_report_to_json(const SimReport& report, int n, int m);
json welfare_report_to_json(const WelfareReport& report, int n, int m);
json comparison_report_to_json(const ComparisonReport& report, int n, int m);

ThresholdGame threshold_game_from_json(const json& doc);
json threshold_game_to_json(const ThresholdGame& tg);
json reduction_mapping_to_json(const ReductionMapping& mapping);

json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& doc);

enum class BidDistribution { Uniform, LogUniform };

struct GeneratorSpec {
  int n = 2;
  int m = 2;
  BidDistribution bid_distribution = BidDistribution::Uniform;
  double lo = 0.0;
  double hi = 1.0;
  double budget_tightness = 1.0;  // budgets = tightness x expected win cost
  std::uint64_t seed = 0;

  void validate() const;
};

/// Deterministic per seed (mt19937_64). Expected win cost is the buyer's
/// first-price spend at the all-halves profile, which is positive whenever
/// the buyer has a positive bid, so budgets are always finite and positive.
ThrottlingGame generate(const GeneratorSpec& spec);

}  // namespace teq
