#include "lyapcert/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lyapcert/parallel.hpp"
#include "lyapcert/simd/kernels.hpp"

namespace lyapcert {

SetDistance::SetDistance(const Region& target, const GridSampler& sampler)
    : target_(target) {
  const Point probe = target.domain().project(
      Point::Constant(target.domain().dim(), 0.5));
  if (target.exact_distance(probe)) return;
  auto block =
      std::make_shared<simd::PointBlock>(static_cast<std::size_t>(target.domain().dim()));
  const auto pts = target.sample(sampler);
  if (pts.empty()) {
    throw CertError(ErrorCode::kEmptyTarget,
                    "target " + target.describe() + " has no samples");
  }
  block->reserve(pts.size());
  for (const auto& p : pts) {
    block->push_back({p.data(), static_cast<std::size_t>(p.size())});
  }
  samples_ = std::move(block);
  error_bound_ = sampler.covering_radius(target.domain());
}

DistanceResult SetDistance::operator()(const Point& x) const {
  if (!samples_) return {*target_.exact_distance(x), 0.0};
  const auto n = simd::nearest(x.data(), *samples_);
  return {std::sqrt(n.sq_distance), error_bound_};
}

ScalarField SetDistance::as_field() const {
  auto self = std::make_shared<SetDistance>(*this);
  ScalarField::Gradient g;
  if (!samples_) {
    g = [self](const Point& x) -> std::optional<Point> {
      const double d = self->value(x);
      if (d <= 0.0) {
        if (self->target_.interior_contains(x, 0.0)) {
          return Point::Zero(x.size());
        }
        return std::nullopt;
      }
      // Central differences of the exact distance; d* is smooth off the
      // target and off equidistant ridges.
      const double step = 1e-7 * std::max(1.0, d);
      Point out(x.size());
      Point probe = x;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        const double fp = self->value(probe);
        probe[i] = x[i] - step;
        const double fm = self->value(probe);
        probe[i] = x[i];
        out[i] = (fp - fm) / (2.0 * step);
      }
      return out;
    };
  }
  return ScalarField(
      "d*", [self](const Point& x) { return self->value(x); }, std::move(g));
}

DistanceResult distance_to_set(const Point& x, const Region& target,
                               const GridSampler& sampler) {
  return SetDistance(target, sampler)(x);
}

EscapeDistance escape_distance(const Region& xprime, const Region& target,
                               const GridSampler& sampler,
                               const Tolerances& tol) {
  const CompactDomain& domain = xprime.domain();
  std::vector<Point> complement;
  for (auto& x : sampler.samples(domain)) {
    if (!xprime.contains(x)) complement.push_back(std::move(x));
  }
  if (complement.empty()) {
    throw CertError(ErrorCode::kNotStrictSubset,
                    "sampling found no points outside " + xprime.describe());
  }
  const SetDistance dstar(target, sampler);
  std::vector<double> d(complement.size());
  parallel_for(complement.size(),
               [&](std::size_t i) { d[i] = dstar.value(complement[i]); });
  const auto it = std::min_element(d.begin(), d.end());
  EscapeDistance out;
  out.d_bar = *it;
  out.argmin = complement[static_cast<std::size_t>(it - d.begin())];
  out.complement_samples = complement.size();

  for (const auto& x : sampler.local_refinement(domain, out.argmin)) {
    if (xprime.contains(x)) continue;
    const double v = dstar.value(x);
    if (v < out.d_bar) {
      out.d_bar = v;
      out.argmin = x;
    }
  }
  out.error_bound = sampler.covering_radius(domain) + dstar.error_bound();
  if (out.d_bar <= tol.eps_bd) {
    throw CertError(ErrorCode::kNonpositiveResult,
                    "target touches the complement of " + xprime.describe() +
                        "; it is not a neighbourhood of the target");
  }
  return out;
}

LipschitzEstimate lipschitz_estimate(const ScalarField& f, const Region& region,
                                     const GridSampler& sampler,
                                     const Tolerances& tol) {
  const auto pts = region.sample(sampler);
  if (pts.empty()) {
    throw CertError(ErrorCode::kEmptyRegion,
                    "no samples in " + region.describe());
  }
  const auto offsets = sampler.neighbour_offsets(region.domain());
  std::vector<double> values(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { values[i] = f(pts[i]); });

  struct Best {
    double slope = 0.0;
    Point x, y;
  };
  std::vector<Best> local(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    Best& b = local[i];
    for (const auto& off : offsets) {
      const Point y = pts[i] + off;
      if (!region.contains(y)) continue;
      const double dist = off.norm();
      const double slope = std::abs(f(y) - values[i]) / dist;
      if (slope > b.slope) b = {slope, pts[i], y};
    }
  });
  Best best;
  for (auto& b : local) {
    if (b.slope > best.slope) best = std::move(b);
  }
  if (pts.size() > 1) {
    std::mt19937_64 rng(sampler.seed() ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    const std::size_t pairs = std::min<std::size_t>(4 * pts.size(), 20000);
    for (std::size_t k = 0; k < pairs; ++k) {
      const std::size_t i = pick(rng);
      const std::size_t j = pick(rng);
      const double dist = (pts[i] - pts[j]).norm();
      if (dist <= 0.0) continue;
      const double slope = std::abs(values[i] - values[j]) / dist;
      if (slope > best.slope) best = {slope, pts[i], pts[j]};
    }
  }
  LipschitzEstimate out;
  out.raw = best.slope;
  out.inflated = best.slope * tol.lipschitz_inflation;
  out.x = best.x.size() ? best.x : pts.front();
  out.y = best.y.size() ? best.y : pts.front();
  return out;
}

double estimate_lipschitz(const ScalarField& f, const Region& region,
                          const GridSampler& sampler, const Tolerances& tol) {
  return lipschitz_estimate(f, region, sampler, tol).inflated;
}

RegionMinimum min_over_region(const ScalarField& f, const Region& region,
                              const GridSampler& sampler,
                              const Tolerances& tol) {
  const auto pts = region.sample(sampler);
  if (pts.empty()) {
    throw CertError(ErrorCode::kEmptyRegion,
                    "no samples in " + region.describe());
  }
  std::vector<double> values(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { values[i] = f(pts[i]); });
  const auto it = std::min_element(values.begin(), values.end());
  RegionMinimum out;
  out.value = *it;
  out.argmin = pts[static_cast<std::size_t>(it - values.begin())];
  out.samples = pts.size();
  for (const auto& x : sampler.local_refinement(region.domain(), out.argmin)) {
    if (!region.contains(x)) continue;
    const double v = f(x);
    if (v < out.value) {
      out.value = v;
      out.argmin = x;
    }
  }
  out.lipschitz = f.lipschitz() ? *f.lipschitz()
                                : estimate_lipschitz(f, region, sampler, tol);
  out.error_bound = out.lipschitz * sampler.covering_radius(region.domain());
  return out;
}

}  // namespace lyapcert
