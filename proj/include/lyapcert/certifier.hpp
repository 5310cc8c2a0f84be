#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyapcert/geometry.hpp"
#include "lyapcert/inclusion.hpp"
#include "lyapcert/invariant.hpp"
#include "lyapcert/verdict.hpp"

namespace lyapcert {

/// One stability problem: a target X*, a candidate neighbourhood X', a
/// Lyapunov candidate W, a decay-rate candidate W~ and the inclusion.
struct Instance {
  std::string id;
  Region target;
  Region xprime;
  ScalarField w;
  ScalarField w_tilde;
  Inclusion inclusion;
};

struct CertifyOptions {
  GridSampler sampler{0.01};
  double dt = 1e-3;
  std::optional<double> horizon;  // default: 20 / (decay rate on X'')
  double max_horizon = 1000.0;
  std::size_t n_starts = 100;
  std::uint64_t seed = 1;
  std::vector<Selector::Kind> policies = {
      Selector::Kind::kFirst, Selector::Kind::kMixture, Selector::Kind::kRandom,
      Selector::Kind::kAdversarial};
  double tol_conv = 1e-3;
  bool strict_level = false;
  /// Also run the invariance suite on X' itself (informational only).
  bool check_xprime_invariance = true;
  double lipschitz_cap = 1e6;
  /// Copies of the first n trajectories of the X'' suite, kept for export.
  std::size_t keep_trajectories = 0;
  Tolerances tol;
};

// Hypothesis checks on the sampled neighbourhood.

/// W >= -eps_num and W~ <= eps_num on every sample of X'.
Verdict check_sign_conditions(const ScalarField& w, const ScalarField& w_tilde,
                              const Region& xprime, const GridSampler& sampler,
                              const Tolerances& tol = default_tolerances());

/// Both fields vanish on the target and nowhere else in cl X'. Points within
/// the covering radius of the target are exempt; grid-local minima of W (and
/// maxima of W~) are polished by a compass search before judging.
Verdict check_zero_sets(const ScalarField& w, const ScalarField& w_tilde,
                        const Region& xprime, const Region& target,
                        const GridSampler& sampler,
                        const Tolerances& tol = default_tolerances());

/// Pass iff the sampled Lipschitz estimate of W on X' is finite and below
/// cap; worst holds the estimate.
Verdict check_lipschitz(const ScalarField& w, const Region& xprime,
                        const GridSampler& sampler, double cap = 1e6,
                        const Tolerances& tol = default_tolerances());

/// <DW(x), v> <= W~(x) + eps_num for every sample x of X' where W is
/// differentiable and every extreme velocity v at x. Throws
/// CertError(kTooManyKinks) if more than 1% of the samples are kinks.
Verdict check_decrease_bound(const ScalarField& w, const ScalarField& w_tilde,
                             const Inclusion& inclusion, const Region& xprime,
                             const GridSampler& sampler,
                             const Tolerances& tol = default_tolerances());

/// Per-step slack for the discrete decrease inequality:
/// tol(dt) = c_tol * dt^2 + floor, c_tol = M * L(W~) + M^2 * L(DW).
struct DecreaseTolerance {
  double c_tol = 0.0;
  double floor = 1e-12;
  double per_step(double dt) const { return c_tol * dt * dt + floor; }
};

DecreaseTolerance decrease_tolerance(const ScalarField& w,
                                     const ScalarField& w_tilde,
                                     const Inclusion& inclusion,
                                     const Region& region,
                                     const GridSampler& sampler,
                                     const Tolerances& tol = default_tolerances());

/// Step inequality W(x_{k+1}) - W(x_k) <= dt W~(x_k) + tol(dt) for every k,
/// and the summed form W(x_N) <= W(x_0) + sum dt W~(x_k) + N tol(dt).
Verdict verify_monotone_decrease(const Trajectory& traj, const ScalarField& w,
                                 const ScalarField& w_tilde,
                                 const DecreaseTolerance& slack,
                                 const std::optional<TrajectoryRef>& ref = {});

/// d*(x_T) <= tol_conv for every trajectory, and after the first time d*
/// drops below tol_conv it never exceeds 2 tol_conv again.
Verdict verify_convergence(const std::vector<Trajectory>& trajs,
                           const SetDistance& dstar, double tol_conv);
Verdict verify_convergence(const Trajectory& traj, const SetDistance& dstar,
                           double tol_conv,
                           const std::optional<TrajectoryRef>& ref = {});

struct RunSettings {
  double h = 0.0;
  double dt = 0.0;
  double horizon = 0.0;
  std::size_t n_starts = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> policies;
  double tol_conv = 0.0;
  double c_tol = 0.0;
  bool strict_level = false;
  double lipschitz_cap = 0.0;
  Tolerances tol;
};

struct TransitivitySection {
  std::vector<std::pair<std::string, Verdict>> conditions;
  Verdict zero_set_identity;
  std::vector<Point> rescued_points;  // in X1 \ X2 with W2~ > 0 >= W1~ + W2~
  double kappa = 2.0;
  std::vector<std::string> failed_conditions;
};

struct StoredTrajectory {
  TrajectoryRef ref;
  Trajectory trajectory;
};

struct Certificate {
  std::string instance_id;
  Verdict sign_conditions;
  Verdict zero_sets;
  Verdict lipschitz_w;
  Verdict decrease_bound;
  Verdict construction_verdict;
  std::optional<InvariantConstruction> construction;
  Verdict forward_invariance;
  Verdict monotone_decrease;
  Verdict convergence;
  Verdict xprime_invariance;  // informational
  std::optional<TransitivitySection> transitivity;
  RunSettings settings;
  std::vector<StoredTrajectory> trajectories;
  bool overall_pass = false;
  std::string conclusion;

  bool hypotheses_pass() const;
  bool trajectories_pass() const;
};

/// Runs every hypothesis check, builds X'', runs the trajectory suites from
/// X'' and assembles the verdicts. The overall verdict is Pass only if every
/// hypothesis, the construction and all trajectory checks pass.
Certificate certify(const Instance& instance,
                    const CertifyOptions& options = {});

/// Horizon used when none is given: 20 / min(-W~/W) over X'' samples away
/// from the target, clamped to [1, max_horizon].
double default_horizon(const InvariantConstruction& construction,
                       const ScalarField& w, const ScalarField& w_tilde,
                       const SetDistance& dstar, const GridSampler& sampler,
                       double max_horizon, const Tolerances& tol);

}  // namespace lyapcert
