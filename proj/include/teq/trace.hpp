#pragma once

#include <vector>

#include "teq/game.hpp"

namespace teq {

/// Round-by-round record of a tatonnement run. Recording is optional; with
/// recording off only `iterations` and `terminal` are filled.
struct DynamicsTrace {
  struct Round {
    ThrottleProfile profile;
    std::vector<double> per_buyer_spend;
  };
  int iterations = 0;
  std::vector<Round> per_round;
  ThrottleProfile terminal;
};

}  // namespace teq
