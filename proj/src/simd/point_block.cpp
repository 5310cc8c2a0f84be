#include "lyapcert/simd/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace lyapcert::simd {

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
    case Backend::kNeon: return "neon";
  }
  return "unknown";
}

void PointBlock::reserve(std::size_t n) {
  if (n > capacity_) regrow(n);
}

void PointBlock::regrow(std::size_t capacity) {
  capacity = (capacity + 3) & ~std::size_t{3};
  std::vector<double> grown(dim_ * capacity, 0.0);
  for (std::size_t a = 0; a < dim_; ++a) {
    std::copy_n(coords_.data() + a * capacity_, size_,
                grown.data() + a * capacity);
  }
  coords_ = std::move(grown);
  capacity_ = capacity;
}

void PointBlock::push_back(std::span<const double> point) {
  if (point.size() != dim_) {
    throw std::invalid_argument("PointBlock::push_back: dimension mismatch");
  }
  if (size_ == capacity_) regrow(std::max<std::size_t>(8, 2 * capacity_));
  for (std::size_t a = 0; a < dim_; ++a) {
    coords_[a * capacity_ + size_] = point[a];
  }
  ++size_;
}

}  // namespace lyapcert::simd
