#include <cstring>

#include "teq/kernels.hpp"

namespace teq {
namespace {

// First price: walking each good's bidders in descending order, the buyer at
// position t wins exactly when all t higher bidders sit out, so her payment is
// theta_t * b_t * prod_{v<t}(1 - theta_v).
void fp_spend_scalar(const PreparedGame& pg, const double* theta,
                     std::size_t width, double* spend) {
  std::memset(spend, 0, sizeof(double) * width * pg.n());
  std::vector<double> pre(width);
  for (const auto& good : pg.goods) {
    std::fill(pre.begin(), pre.end(), 1.0);
    const std::size_t k = good.buyer.size();
    for (std::size_t t = 0; t < k; ++t) {
      const double b = good.bid[t];
      const double* th = theta + static_cast<std::size_t>(good.buyer[t]) * width;
      double* sp = spend + static_cast<std::size_t>(good.buyer[t]) * width;
      for (std::size_t lane = 0; lane < width; ++lane) {
        sp[lane] += b * th[lane] * pre[lane];
        pre[lane] *= 1.0 - th[lane];
      }
    }
  }
}

// Second price: buyer at position t pays the bid of the highest participating
// lower bidder u, i.e. sum over u>t of b_u theta_t theta_u prod_{v<u, v!=t}
// (1 - theta_v). The exclusion product is prefix[t] * suffix, with the suffix
// extended as t walks down from u-1.
void sp_spend_scalar(const PreparedGame& pg, const double* theta,
                     std::size_t width, double* spend) {
  std::memset(spend, 0, sizeof(double) * width * pg.n());
  std::vector<double> prefix;  // k x width, prefix[t] = prod_{v<t}(1-theta_v)
  std::vector<double> suf(width);
  for (const auto& good : pg.goods) {
    const std::size_t k = good.buyer.size();
    if (k < 2) continue;
    prefix.assign(k * width, 1.0);
    for (std::size_t t = 1; t < k; ++t) {
      const double* th =
          theta + static_cast<std::size_t>(good.buyer[t - 1]) * width;
      const double* prev = prefix.data() + (t - 1) * width;
      double* cur = prefix.data() + t * width;
      for (std::size_t lane = 0; lane < width; ++lane)
        cur[lane] = prev[lane] * (1.0 - th[lane]);
    }
    for (std::size_t u = 1; u < k; ++u) {
      const double b_u = good.bid[u];
      const double* th_u =
          theta + static_cast<std::size_t>(good.buyer[u]) * width;
      std::fill(suf.begin(), suf.end(), 1.0);
      for (std::size_t t = u; t-- > 0;) {
        const double* th_t =
            theta + static_cast<std::size_t>(good.buyer[t]) * width;
        double* sp = spend + static_cast<std::size_t>(good.buyer[t]) * width;
        const double* pre = prefix.data() + t * width;
        for (std::size_t lane = 0; lane < width; ++lane) {
          sp[lane] += b_u * th_u[lane] * th_t[lane] * pre[lane] * suf[lane];
          suf[lane] *= 1.0 - th_t[lane];
        }
      }
    }
  }
}

}  // namespace

const SpendKernels& scalar_spend_kernels() {
  static const SpendKernels k{fp_spend_scalar, sp_spend_scalar, "scalar"};
  return k;
}

const SpendKernels& spend_kernels() {
  static const SpendKernels k = [] {
    if (detail::avx2_available())
      return SpendKernels{detail::fp_spend_avx2, detail::sp_spend_avx2, "avx2"};
    return scalar_spend_kernels();
  }();
  return k;
}

std::vector<double> fp_spend(const PreparedGame& pg,
                             const ThrottleProfile& theta) {
  std::vector<double> out(theta.size());
  spend_kernels().fp(pg, theta.data(), 1, out.data());
  return out;
}

std::vector<double> sp_spend(const PreparedGame& pg,
                             const ThrottleProfile& theta) {
  std::vector<double> out(theta.size());
  spend_kernels().sp(pg, theta.data(), 1, out.data());
  return out;
}

std::vector<double> spend(const PreparedGame& pg, const ThrottleProfile& theta,
                          AuctionFormat format) {
  return format == AuctionFormat::FirstPrice ? fp_spend(pg, theta)
                                             : sp_spend(pg, theta);
}

}  // namespace teq
