// Compiled with -mavx2 only (no FMA) so lane arithmetic rounds exactly like
// the scalar reference.

#include "lyapcert/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#endif

#include <limits>

namespace lyapcert::simd::avx2 {

#if defined(__AVX2__)

Nearest nearest(const double* query, const PointBlock& block) {
  const std::size_t n = block.size();
  const std::size_t dim = block.dim();
  const double inf = std::numeric_limits<double>::infinity();

  __m256d best = _mm256_set1_pd(inf);
  __m256d best_idx = _mm256_setzero_pd();
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d step = _mm256_set1_pd(4.0);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t a = 0; a < dim; ++a) {
      const __m256d p = _mm256_loadu_pd(block.axis(a) + i);
      const __m256d d = _mm256_sub_pd(p, _mm256_set1_pd(query[a]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    const __m256d lt = _mm256_cmp_pd(acc, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, acc, lt);
    best_idx = _mm256_blendv_pd(best_idx, idx, lt);
    idx = _mm256_add_pd(idx, step);
  }

  alignas(32) double lane_val[4];
  alignas(32) double lane_idx[4];
  _mm256_store_pd(lane_val, best);
  _mm256_store_pd(lane_idx, best_idx);

  Nearest out{0, inf};
  for (int l = 0; l < 4; ++l) {
    const auto li = static_cast<std::size_t>(lane_idx[l]);
    if (lane_val[l] < out.sq_distance ||
        (lane_val[l] == out.sq_distance && li < out.index)) {
      out = {li, lane_val[l]};
    }
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      const double d = block.axis(a)[i] - query[a];
      const double sq = d * d;
      acc = acc + sq;
    }
    if (acc < out.sq_distance) out = {i, acc};
  }
  return out;
}

#else

Nearest nearest(const double* query, const PointBlock& block) {
  return scalar::nearest(query, block);
}

#endif

}  // namespace lyapcert::simd::avx2
