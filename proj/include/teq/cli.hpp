#pragma once

namespace teq {

/// Dispatches the command-line surface. Exit codes: 0 success/Accept,
/// 1 Reject or NotConverged, 2 input or usage error.
int run(int argc, const char* const* argv);

}  // namespace teq
