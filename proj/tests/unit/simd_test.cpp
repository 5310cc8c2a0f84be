#include <cstring>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <lyapcert/simd/kernels.hpp>

using namespace lyapcert::simd;

namespace {

PointBlock random_block(std::size_t dim, std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PointBlock block(dim);
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : p) v = u(rng);
    block.push_back(p);
  }
  return block;
}

std::vector<Backend> available() {
  std::vector<Backend> out;
  for (Backend b : {Backend::kScalar, Backend::kAvx2, Backend::kNeon}) {
    if (backend_available(b)) out.push_back(b);
  }
  return out;
}

}  // namespace

TEST(Simd, ScalarAlwaysAvailable) {
  EXPECT_TRUE(backend_available(Backend::kScalar));
  EXPECT_TRUE(backend_available(active_backend()));
}

TEST(Simd, BackendsAgreeBitForBit) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (std::size_t dim : {1u, 2u, 3u, 4u, 7u}) {
    for (std::size_t n : {1u, 3u, 4u, 5u, 17u, 256u, 1001u}) {
      const auto block = random_block(dim, n, static_cast<unsigned>(dim * 1000 + n));
      std::vector<double> q(dim);
      for (int trial = 0; trial < 20; ++trial) {
        for (auto& v : q) v = u(rng);
        const Nearest ref = nearest(q.data(), block, Backend::kScalar);
        for (Backend b : available()) {
          const Nearest got = nearest(q.data(), block, b);
          ASSERT_EQ(got.index, ref.index) << to_string(b);
          ASSERT_EQ(std::memcmp(&got.sq_distance, &ref.sq_distance, sizeof(double)), 0)
              << to_string(b);
        }
      }
    }
  }
}

TEST(Simd, TiesResolveToSmallestIndex) {
  PointBlock block(2);
  for (int i = 0; i < 9; ++i) {
    const double p[2] = {i % 2 == 0 ? 1.0 : -1.0, 0.0};
    block.push_back(p);
  }
  const double q[2] = {0.0, 0.0};
  for (Backend b : available()) EXPECT_EQ(nearest(q, block, b).index, 0u) << to_string(b);
}

TEST(Simd, MatchesBruteForce) {
  const auto targets = random_block(3, 333, 9);
  const auto queries = random_block(3, 50, 10);
  std::vector<double> out(queries.size());
  min_sq_distances(queries, targets, out);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    double best = 1e300;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < 3; ++a) {
        const double d = queries.at(i, a) - targets.at(j, a);
        s += d * d;
      }
      best = std::min(best, s);
    }
    ASSERT_NEAR(out[i], best, 1e-15);
  }
}

TEST(Simd, SetBackendRoundTrip) {
  const Backend original = active_backend();
  set_backend(Backend::kScalar);
  EXPECT_EQ(active_backend(), Backend::kScalar);
  for (Backend b : {Backend::kAvx2, Backend::kNeon}) {
    if (!backend_available(b)) EXPECT_THROW(set_backend(b), std::invalid_argument);
  }
  set_backend(original);
}
