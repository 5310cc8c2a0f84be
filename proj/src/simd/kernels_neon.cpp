#include "lyapcert/simd/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

#include <limits>

namespace lyapcert::simd::neon {

#if defined(__aarch64__)

// Two lanes of float64; same accumulation order as the scalar kernel.
Nearest nearest(const double* query, const PointBlock& block) {
  const std::size_t n = block.size();
  const std::size_t dim = block.dim();
  const double inf = std::numeric_limits<double>::infinity();

  float64x2_t best = vdupq_n_f64(inf);
  float64x2_t best_idx = vdupq_n_f64(0.0);
  const double init_idx[2] = {0.0, 1.0};
  float64x2_t idx = vld1q_f64(init_idx);
  const float64x2_t step = vdupq_n_f64(2.0);

  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t a = 0; a < dim; ++a) {
      const float64x2_t d =
          vsubq_f64(vld1q_f64(block.axis(a) + i), vdupq_n_f64(query[a]));
      acc = vaddq_f64(acc, vmulq_f64(d, d));
    }
    const uint64x2_t lt = vcltq_f64(acc, best);
    best = vbslq_f64(lt, acc, best);
    best_idx = vbslq_f64(lt, idx, best_idx);
    idx = vaddq_f64(idx, step);
  }

  double lane_val[2];
  double lane_idx[2];
  vst1q_f64(lane_val, best);
  vst1q_f64(lane_idx, best_idx);

  Nearest out{0, inf};
  for (int l = 0; l < 2; ++l) {
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

}  // namespace lyapcert::simd::neon
