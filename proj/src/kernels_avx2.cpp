// AVX2 spend kernels: identical recurrences to the scalar reference, four
// profiles per vector lane group. Tail lanes fall back to the scalar loop.
#include <immintrin.h>

#include <cstring>

#include "teq/kernels.hpp"

namespace teq {
namespace detail {

bool avx2_available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

constexpr std::size_t kLanes = 4;

void fp_spend_lanes(const PreparedGame& pg, const double* theta,
                    std::size_t width, double* spend, std::size_t lo,
                    std::size_t hi) {
  std::vector<double> pre(hi - lo);
  for (const auto& good : pg.goods) {
    std::fill(pre.begin(), pre.end(), 1.0);
    for (std::size_t t = 0; t < good.buyer.size(); ++t) {
      const double b = good.bid[t];
      const double* th =
          theta + static_cast<std::size_t>(good.buyer[t]) * width;
      double* sp = spend + static_cast<std::size_t>(good.buyer[t]) * width;
      for (std::size_t lane = lo; lane < hi; ++lane) {
        sp[lane] += b * th[lane] * pre[lane - lo];
        pre[lane - lo] *= 1.0 - th[lane];
      }
    }
  }
}

void sp_spend_lanes(const PreparedGame& pg, const double* theta,
                    std::size_t width, double* spend, std::size_t lo,
                    std::size_t hi) {
  const std::size_t w = hi - lo;
  std::vector<double> prefix, suf(w);
  for (const auto& good : pg.goods) {
    const std::size_t k = good.buyer.size();
    if (k < 2) continue;
    prefix.assign(k * w, 1.0);
    for (std::size_t t = 1; t < k; ++t) {
      const double* th =
          theta + static_cast<std::size_t>(good.buyer[t - 1]) * width + lo;
      const double* prev = prefix.data() + (t - 1) * w;
      double* cur = prefix.data() + t * w;
      for (std::size_t lane = 0; lane < w; ++lane)
        cur[lane] = prev[lane] * (1.0 - th[lane]);
    }
    for (std::size_t u = 1; u < k; ++u) {
      const double b_u = good.bid[u];
      const double* th_u =
          theta + static_cast<std::size_t>(good.buyer[u]) * width + lo;
      std::fill(suf.begin(), suf.end(), 1.0);
      for (std::size_t t = u; t-- > 0;) {
        const double* th_t =
            theta + static_cast<std::size_t>(good.buyer[t]) * width + lo;
        double* sp =
            spend + static_cast<std::size_t>(good.buyer[t]) * width + lo;
        const double* pre = prefix.data() + t * w;
        for (std::size_t lane = 0; lane < w; ++lane) {
          sp[lane] += b_u * th_u[lane] * th_t[lane] * pre[lane] * suf[lane];
          suf[lane] *= 1.0 - th_t[lane];
        }
      }
    }
  }
}

void fp_spend_avx2_block(const PreparedGame& pg, const double* theta,
                         std::size_t width, double* spend, std::size_t lo) {
  const __m256d one = _mm256_set1_pd(1.0);
  for (const auto& good : pg.goods) {
    __m256d p = one;
    for (std::size_t t = 0; t < good.buyer.size(); ++t) {
      const std::size_t off =
          static_cast<std::size_t>(good.buyer[t]) * width + lo;
      const __m256d b = _mm256_set1_pd(good.bid[t]);
      const __m256d th = _mm256_loadu_pd(theta + off);
      __m256d sp = _mm256_loadu_pd(spend + off);
      sp = _mm256_fmadd_pd(_mm256_mul_pd(b, th), p, sp);
      _mm256_storeu_pd(spend + off, sp);
      p = _mm256_mul_pd(p, _mm256_sub_pd(one, th));
    }
  }
}

void sp_spend_avx2_block(const PreparedGame& pg, const double* theta,
                         std::size_t width, double* spend, std::size_t lo) {
  const __m256d one = _mm256_set1_pd(1.0);
  struct Lane4 {
    __m256d v;
  };
  std::vector<Lane4> prefix;
  for (const auto& good : pg.goods) {
    const std::size_t k = good.buyer.size();
    if (k < 2) continue;
    prefix.assign(k, Lane4{one});
    for (std::size_t t = 1; t < k; ++t) {
      const __m256d th = _mm256_loadu_pd(
          theta + static_cast<std::size_t>(good.buyer[t - 1]) * width + lo);
      prefix[t].v = _mm256_mul_pd(prefix[t - 1].v, _mm256_sub_pd(one, th));
    }
    for (std::size_t u = 1; u < k; ++u) {
      const __m256d bu_thu = _mm256_mul_pd(
          _mm256_set1_pd(good.bid[u]),
          _mm256_loadu_pd(theta +
                          static_cast<std::size_t>(good.buyer[u]) * width + lo));
      __m256d suf = one;
      for (std::size_t t = u; t-- > 0;) {
        const std::size_t off =
            static_cast<std::size_t>(good.buyer[t]) * width + lo;
        const __m256d th = _mm256_loadu_pd(theta + off);
        const __m256d term = _mm256_mul_pd(
            _mm256_mul_pd(bu_thu, th), _mm256_mul_pd(prefix[t].v, suf));
        __m256d sp = _mm256_loadu_pd(spend + off);
        _mm256_storeu_pd(spend + off, _mm256_add_pd(sp, term));
        suf = _mm256_mul_pd(suf, _mm256_sub_pd(one, th));
      }
    }
  }
}

}  // namespace

void fp_spend_avx2(const PreparedGame& pg, const double* theta,
                   std::size_t width, double* spend) {
  std::memset(spend, 0, sizeof(double) * width * pg.n());
  std::size_t lo = 0;
  for (; lo + kLanes <= width; lo += kLanes)
    fp_spend_avx2_block(pg, theta, width, spend, lo);
  if (lo < width) fp_spend_lanes(pg, theta, width, spend, lo, width);
}

void sp_spend_avx2(const PreparedGame& pg, const double* theta,
                   std::size_t width, double* spend) {
  std::memset(spend, 0, sizeof(double) * width * pg.n());
  std::size_t lo = 0;
  for (; lo + kLanes <= width; lo += kLanes)
    sp_spend_avx2_block(pg, theta, width, spend, lo);
  if (lo < width) sp_spend_lanes(pg, theta, width, spend, lo, width);
}

}  // namespace detail
}  // namespace teq
