#pragma once

// Nearest-point scans over structure-of-arrays point blocks. These loops
// dominate the set-distance computations (d*(x), escape distances, sampled
// target distances), so they come in a scalar reference flavour and SIMD
// flavours selected once at runtime.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace lyapcert::simd {

enum class Backend { kScalar, kAvx2, kNeon };

std::string_view to_string(Backend backend);

/// Coordinates stored axis-major: coords[a * capacity + i] is axis a of
/// point i. Axis rows are padded to a multiple of 4; the padding is
/// never read.
class PointBlock {
 public:
  PointBlock() = default;
  explicit PointBlock(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  void reserve(std::size_t n);
  void push_back(std::span<const double> point);

  const double* axis(std::size_t a) const noexcept {
    return coords_.data() + a * capacity_;
  }
  double at(std::size_t i, std::size_t a) const noexcept {
    return coords_[a * capacity_ + i];
  }

 private:
  void regrow(std::size_t capacity);

  std::size_t dim_ = 0;
  std::size_t size_ = 0;
  std::size_t capacity_ = 0;
  std::vector<double> coords_;
};

struct Nearest {
  std::size_t index = 0;
  double sq_distance = 0.0;
};

// Per-backend kernels. All variants return bit-identical results: squared
// distances are accumulated axis by axis with separate multiply and add, and
// ties resolve to the smallest index.
namespace scalar {
Nearest nearest(const double* query, const PointBlock& block);
}
namespace avx2 {
Nearest nearest(const double* query, const PointBlock& block);
}
namespace neon {
Nearest nearest(const double* query, const PointBlock& block);
}

bool backend_available(Backend backend);

/// The backend picked at startup: the widest available one unless the
/// LYAPCERT_SIMD environment variable names another ("scalar", "avx2",
/// "neon").
Backend active_backend();

/// Overrides the dispatch target; throws std::invalid_argument if the
/// backend is not available on this machine.
void set_backend(Backend backend);

/// Requires a non-empty block; query must hold block.dim() values.
Nearest nearest(const double* query, const PointBlock& block);
Nearest nearest(const double* query, const PointBlock& block, Backend backend);

/// out[i] = min squared distance from queries point i to targets.
void min_sq_distances(const PointBlock& queries, const PointBlock& targets,
                      std::span<double> out);

}  // namespace lyapcert::simd
