#include "lyapcert/simd/kernels.hpp"

#include <limits>

namespace lyapcert::simd::scalar {

Nearest nearest(const double* query, const PointBlock& block) {
  Nearest best{0, std::numeric_limits<double>::infinity()};
  const std::size_t n = block.size();
  const std::size_t dim = block.dim();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
      const double d = block.axis(a)[i] - query[a];
      const double sq = d * d;
      acc = acc + sq;
    }
    if (acc < best.sq_distance) best = {i, acc};
  }
  return best;
}

}  // namespace lyapcert::simd::scalar
