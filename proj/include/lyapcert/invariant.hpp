#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lyapcert/geometry.hpp"
#include "lyapcert/inclusion.hpp"
#include "lyapcert/verdict.hpp"

namespace lyapcert {

/// The forward-invariant sublevel neighbourhood built from a Lyapunov
/// candidate W on a neighbourhood X' of a closed target X*:
///
///   d_bar = min { d*(x) : x outside X' }
///   X'_0  = cl X'  intersected with  { d* >= d_bar / 2 }
///   w_bar = min { W(x) : x in X'_0 }
///   X''   = { W < w_bar / 2 }  intersected with  X'
///
/// Any solution that starts in X'' stays there as long as W is nonincreasing
/// inside X'.
struct InvariantConstruction {
  struct Diagnostics {
    double h = 0.0;
    double covering_radius = 0.0;
    std::size_t complement_samples = 0;
    std::size_t annulus_samples = 0;
    std::size_t xpp_samples = 0;
    std::size_t target_samples = 0;
    // Grid assertions; all must be zero for a valid construction.
    std::size_t escape_implication_violations = 0;   // d* < d_bar => x in X'
    std::size_t annulus_threshold_violations = 0;    // x in X'_0 => W >= w_bar - margin
    std::size_t xpp_distance_violations = 0;         // x in X'' => d* < d_bar / 2
    std::size_t target_outside_xpp = 0;              // X* within X''
  };

  double d_bar = 0.0;
  double d_bar_error = 0.0;
  Point d_bar_argmin;
  Region annulus;  // X'_0
  double w_bar = 0.0;
  double w_bar_error = 0.0;
  Point w_bar_argmin;
  double level = 0.0;
  bool strict = false;
  double lipschitz_w = 0.0;   // estimated on X'
  double escape_slack = 0.0;  // closure widening of X'' for escape tests
  Region neighbourhood;       // X''
  Diagnostics diagnostics;
};

struct ConstructionOptions {
  GridSampler sampler{0.01};
  /// Use level = (w_bar - L_W * sqrt(A) * h) / 2 instead of w_bar / 2 so the
  /// grid over-estimate of w_bar cannot make X'' too large.
  bool strict = false;
  Tolerances tol;
};

/// Throws CertError with kNotStrictSubset / kNonpositiveResult (from the
/// escape distance), kEmptyAnnulus, kNonpositiveLevel, or
/// kPreconditionFailed when W < -eps_bd somewhere on cl X' or a grid
/// assertion of the construction fails.
InvariantConstruction construct_invariant_neighborhood(
    const ScalarField& w, const Region& xprime, const Region& target,
    const ConstructionOptions& options = {});

/// Called once per integrated trajectory with its index in the suite.
using TrajectoryObserver = std::function<void(
    std::size_t index, const Trajectory& traj, const TrajectoryRef& ref)>;

struct InvarianceOptions {
  std::size_t n_starts = 500;
  double horizon = 50.0;
  double dt = 0.01;
  std::vector<Selector::Kind> policies = {
      Selector::Kind::kFirst, Selector::Kind::kMixture, Selector::Kind::kRandom,
      Selector::Kind::kAdversarial};
  std::uint64_t seed = 1;
  GridSampler sampler{0.01};
  /// Objective for the adversarial selector; defaults to the distance from
  /// the centroid of the region's samples.
  std::optional<ScalarField> adversary_objective;
  /// Stop integrating a trajectory at its first escape.
  bool stop_at_escape = false;
  TrajectoryObserver observer;
  Tolerances tol;
};

struct InvarianceReport {
  Verdict verdict;  // Pass == Invariant(empirical); Fail carries escapes
  std::size_t trajectories = 0;
  std::size_t boundary_starts = 0;
  std::vector<Point> starts;
};

/// Half of the starts lie within 2h of the region boundary, the rest are
/// spread over the region; all are jittered off the grid.
std::vector<Point> invariance_starts(const Region& region, std::size_t n,
                                     const GridSampler& sampler,
                                     std::uint64_t seed,
                                     std::size_t* boundary_count = nullptr);

/// Per-trajectory seed for the random selector.
std::uint64_t trajectory_seed(std::uint64_t base, std::size_t index);

Selector make_selector(Selector::Kind kind, std::uint64_t seed,
                       const ScalarField& objective);

/// Integrates from boundary-biased starts under every policy and reports an
/// escape witness for each trajectory that leaves the region's closure (as
/// widened by eps_bd and the region's own closure slack).
InvarianceReport verify_forward_invariance(const Inclusion& inclusion,
                                           const Region& region,
                                           const InvarianceOptions& options = {});

}  // namespace lyapcert
