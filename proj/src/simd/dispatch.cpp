#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "lyapcert/simd/kernels.hpp"

namespace lyapcert::simd {
namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend detect() {
  if (const char* env = std::getenv("LYAPCERT_SIMD")) {
    const std::string name(env);
    if (name == "scalar") return Backend::kScalar;
    if (name == "avx2" && backend_available(Backend::kAvx2)) {
      return Backend::kAvx2;
    }
    if (name == "neon" && backend_available(Backend::kNeon)) {
      return Backend::kNeon;
    }
  }
  if (backend_available(Backend::kAvx2)) return Backend::kAvx2;
  if (backend_available(Backend::kNeon)) return Backend::kNeon;
  return Backend::kScalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{detect()};
  return backend;
}

}  // namespace

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return true;
    case Backend::kAvx2:
#if defined(LYAPCERT_HAVE_AVX2)
      return cpu_has_avx2();
#else
      return false;
#endif
    case Backend::kNeon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw std::invalid_argument("SIMD backend not available: " +
                                std::string(to_string(backend)));
  }
  current().store(backend, std::memory_order_relaxed);
}

Nearest nearest(const double* query, const PointBlock& block, Backend backend) {
  switch (backend) {
    case Backend::kAvx2: return avx2::nearest(query, block);
    case Backend::kNeon: return neon::nearest(query, block);
    case Backend::kScalar: break;
  }
  return scalar::nearest(query, block);
}

Nearest nearest(const double* query, const PointBlock& block) {
  return nearest(query, block, active_backend());
}

void min_sq_distances(const PointBlock& queries, const PointBlock& targets,
                      std::span<double> out) {
  if (out.size() != queries.size() || queries.dim() != targets.dim()) {
    throw std::invalid_argument("min_sq_distances: shape mismatch");
  }
  const Backend backend = active_backend();
  std::vector<double> q(queries.dim());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    for (std::size_t a = 0; a < queries.dim(); ++a) q[a] = queries.at(i, a);
    out[i] = nearest(q.data(), targets, backend).sq_distance;
  }
}

}  // namespace lyapcert::simd
