#pragma once

#include <cstddef>
#include <vector>

#include "teq/game.hpp"

namespace teq {

/// Batched per-buyer expected-spend kernels. Profiles are laid out SoA:
/// theta[i * width + lane] is buyer i's parameter in profile `lane`, and
/// spend has the same layout. Both formats share the prepared per-good
/// descending bid order.
using SpendKernelFn = void (*)(const PreparedGame& pg, const double* theta,
                               std::size_t width, double* spend);

struct SpendKernels {
  SpendKernelFn fp;
  SpendKernelFn sp;
  const char* name;
};

/// Portable reference kernels.
const SpendKernels& scalar_spend_kernels();

/// Best kernels for this machine (AVX2 when available, scalar otherwise).
/// Selected once at first call.
const SpendKernels& spend_kernels();

/// Single-profile conveniences used by solvers and verification.
std::vector<double> fp_spend(const PreparedGame& pg, const ThrottleProfile& theta);
std::vector<double> sp_spend(const PreparedGame& pg, const ThrottleProfile& theta);
std::vector<double> spend(const PreparedGame& pg, const ThrottleProfile& theta,
                          AuctionFormat format);

namespace detail {
void fp_spend_avx2(const PreparedGame& pg, const double* theta,
                   std::size_t width, double* spend);
void sp_spend_avx2(const PreparedGame& pg, const double* theta,
                   std::size_t width, double* spend);
bool avx2_available();
}  // namespace detail

}  // namespace teq
