#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lyapcert/domain.hpp"
#include "lyapcert/field.hpp"

namespace lyapcert {

/// A subset of a CompactDomain built from primitive descriptions (finite
/// point sets, balls around point sets, boxes, sub/superlevel sets of scalar
/// fields, predicates) combined by intersection, complement and closure.
///
/// Besides plain membership every region answers two tolerance-widened
/// questions: closure_contains(x, eps) over-approximates membership in the
/// closure and interior_contains(x, eps) under-approximates membership in
/// the interior. Complements swap the two.
class Region {
 public:
  struct Node;

  /// Placeholder; every query on a default-constructed region is invalid.
  Region() = default;

  static Region whole(const CompactDomain& domain);
  static Region points(const CompactDomain& domain, std::vector<Point> pts);
  static Region ball(const CompactDomain& domain, std::vector<Point> centers,
                     double radius, bool open = true);
  static Region box(const CompactDomain& domain, Eigen::VectorXd lo,
                    Eigen::VectorXd hi, bool open = true);
  /// {f < level}. closure_slack widens the closure test to
  /// f <= level + closure_slack (+ eps).
  static Region sublevel(const CompactDomain& domain, ScalarField f,
                         double level, double closure_slack = 0.0);
  /// {f >= level} when closed, {f > level} otherwise.
  static Region superlevel(const CompactDomain& domain, ScalarField f,
                           double level, bool closed = true);
  static Region predicate(const CompactDomain& domain, std::string name,
                          std::function<bool(const Point&)> member,
                          bool open);

  Region intersect(const Region& other) const;
  Region complement() const;
  Region closure(double eps = default_tolerances().eps_bd) const;

  const CompactDomain& domain() const noexcept { return *domain_; }

  bool contains(const Point& x) const;
  bool closure_contains(const Point& x,
                        double eps = default_tolerances().eps_bd) const;
  bool interior_contains(const Point& x,
                         double eps = default_tolerances().eps_bd) const;

  bool is_open() const;
  bool is_closed() const;

  /// Exact distance from x for finite point sets and balls, else nullopt.
  std::optional<double> exact_distance(const Point& x) const;

  /// Member points: the points themselves for finite sets, otherwise the
  /// domain grid filtered by membership (ball centers are always included).
  std::vector<Point> sample(const GridSampler& sampler) const;
  /// Grid points passing closure_contains(x, eps).
  std::vector<Point> closure_sample(
      const GridSampler& sampler,
      double eps = default_tolerances().eps_bd) const;

  std::string describe() const;

  bool valid() const noexcept { return static_cast<bool>(node_); }

 private:
  Region(std::shared_ptr<const CompactDomain> domain,
         std::shared_ptr<const Node> node)
      : domain_(std::move(domain)), node_(std::move(node)) {}

  std::shared_ptr<const CompactDomain> domain_;
  std::shared_ptr<const Node> node_;
};

}  // namespace lyapcert
