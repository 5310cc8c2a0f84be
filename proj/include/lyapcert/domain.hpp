#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lyapcert/types.hpp"

namespace lyapcert {

/// The compact state space: an axis-aligned box or the probability simplex
/// {x >= 0, sum x = 1}, both with the Euclidean metric.
class CompactDomain {
 public:
  enum class Kind { kBox, kSimplex };

  static CompactDomain box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static CompactDomain simplex(int dimension);

  Kind kind() const noexcept { return kind_; }
  bool is_simplex() const noexcept { return kind_ == Kind::kSimplex; }
  int dim() const noexcept { return dim_; }
  const Eigen::VectorXd& lo() const noexcept { return lo_; }
  const Eigen::VectorXd& hi() const noexcept { return hi_; }

  bool contains(const Point& x, double tol = 1e-12) const;
  double distance(const Point& x, const Point& y) const { return (x - y).norm(); }

  /// Euclidean projection onto the domain.
  Point project(const Point& x) const;

  /// Projects a displacement onto the domain's tangent directions: identity
  /// for boxes, removal of the mean component for the simplex.
  Point tangent(const Point& v) const;

  /// Largest distance between two domain points.
  double diameter() const;

  bool operator==(const CompactDomain& other) const;

 private:
  CompactDomain(Kind kind, int dim, Eigen::VectorXd lo, Eigen::VectorXd hi)
      : kind_(kind), dim_(dim), lo_(std::move(lo)), hi_(std::move(hi)) {}

  Kind kind_;
  int dim_;
  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
};

/// Regular sampling of a domain. Boxes use a tensor grid whose per-axis
/// spacing is at most h (endpoints included); the simplex uses the mesh
/// {k / m : sum k = m} with m = ceil(1 / h).
class GridSampler {
 public:
  explicit GridSampler(double h, bool jitter = false, std::uint64_t seed = 0);

  double h() const noexcept { return h_; }
  bool jitter() const noexcept { return jitter_; }
  std::uint64_t seed() const noexcept { return seed_; }

  GridSampler refined() const { return GridSampler(h_ / 2, jitter_, seed_); }

  /// Every domain point lies within covering_radius(domain) of a sample.
  double covering_radius(const CompactDomain& domain) const;

  std::vector<Point> samples(const CompactDomain& domain) const;

  /// Points on a spacing-h/2 lattice within distance h of center (clipped to
  /// the domain); used to polish grid argmins.
  std::vector<Point> local_refinement(const CompactDomain& domain,
                                      const Point& center) const;

  /// Offsets to lattice neighbours at grid spacing: axis and (for A <= 4)
  /// diagonal moves for boxes, (e_i - e_j) / m moves for the simplex.
  std::vector<Point> neighbour_offsets(const CompactDomain& domain) const;

 private:
  double h_;
  bool jitter_;
  std::uint64_t seed_;
};

}  // namespace lyapcert
