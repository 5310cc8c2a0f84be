#pragma once

#include <memory>

#include "lyapcert/field.hpp"
#include "lyapcert/region.hpp"

namespace lyapcert {

namespace simd {
class PointBlock;
}

struct DistanceResult {
  double value = 0.0;
  double error_bound = 0.0;  // 0 for exact (finite / ball) targets
};

/// d*(x) = min over the target of d(x, x*). Exact for finite point sets and
/// balls; otherwise the minimum over the target's grid samples, which
/// over-estimates the true distance by at most the sampler's covering radius.
class SetDistance {
 public:
  SetDistance(const Region& target, const GridSampler& sampler);

  DistanceResult operator()(const Point& x) const;
  double value(const Point& x) const { return (*this)(x).value; }
  double error_bound() const noexcept { return error_bound_; }
  bool exact() const noexcept { return !samples_; }

  /// d* as a scalar field (Lipschitz with constant 1). Its gradient is the
  /// unit vector away from the nearest target point and is undefined on the
  /// target itself.
  ScalarField as_field() const;

 private:
  Region target_;
  std::shared_ptr<const simd::PointBlock> samples_;
  double error_bound_ = 0.0;
};

/// Throws CertError(kEmptyTarget) when the target has no points or samples.
DistanceResult distance_to_set(const Point& x, const Region& target,
                               const GridSampler& sampler);

struct EscapeDistance {
  double d_bar = 0.0;
  double error_bound = 0.0;
  Point argmin;
  std::size_t complement_samples = 0;
};

/// d_bar = min of d* over the sampled complement of xprime, polished by one
/// local refinement pass around the argmin. Every sampled x with
/// d*(x) < d_bar then lies in xprime.
EscapeDistance escape_distance(const Region& xprime, const Region& target,
                               const GridSampler& sampler,
                               const Tolerances& tol = default_tolerances());

struct RegionMinimum {
  double value = 0.0;
  Point argmin;
  double error_bound = 0.0;  // lipschitz * covering radius
  double lipschitz = 0.0;
  std::size_t samples = 0;
};

RegionMinimum min_over_region(const ScalarField& f, const Region& region,
                              const GridSampler& sampler,
                              const Tolerances& tol = default_tolerances());

struct LipschitzEstimate {
  double raw = 0.0;       // largest observed difference quotient
  double inflated = 0.0;  // raw * tol.lipschitz_inflation
  Point x, y;             // the pair attaining raw
};

/// Largest |f(x) - f(y)| / d(x, y) over lattice-neighbour pairs inside the
/// region and a seeded batch of random sample pairs.
LipschitzEstimate lipschitz_estimate(const ScalarField& f, const Region& region,
                                     const GridSampler& sampler,
                                     const Tolerances& tol = default_tolerances());

double estimate_lipschitz(const ScalarField& f, const Region& region,
                          const GridSampler& sampler,
                          const Tolerances& tol = default_tolerances());

}  // namespace lyapcert
