#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lyapcert/domain.hpp"
#include "lyapcert/field.hpp"

namespace lyapcert {

/// A differential inclusion xdot in V(x), represented by the finitely many
/// extreme velocities of V(x) at each point (a single velocity for ordinary
/// vector fields). bound() is a constant M with |v| <= M for all v in V(x).
class Inclusion {
 public:
  using VectorField = std::function<Point(const Point&)>;
  using ExtremeMap = std::function<std::vector<Point>(const Point&)>;

  static Inclusion from_vector_field(const CompactDomain& domain,
                                     std::string name, VectorField field,
                                     double bound);
  static Inclusion from_extremes(const CompactDomain& domain, std::string name,
                                 ExtremeMap extremes, double bound);
  /// Convex hull of the members' velocity sets.
  static Inclusion hull(const std::vector<Inclusion>& members);

  const CompactDomain& domain() const noexcept { return domain_; }
  const std::string& name() const noexcept { return name_; }
  double bound() const noexcept { return bound_; }
  bool singleton_valued() const noexcept { return singleton_; }

  /// Never empty.
  std::vector<Point> velocities_at(const Point& x) const;

  Inclusion with_bound(double bound) const;

 private:
  Inclusion(CompactDomain domain, std::string name, ExtremeMap extremes,
            double bound, bool singleton)
      : domain_(std::move(domain)),
        name_(std::move(name)),
        extremes_(std::move(extremes)),
        bound_(bound),
        singleton_(singleton) {}

  CompactDomain domain_;
  std::string name_;
  ExtremeMap extremes_;
  double bound_;
  bool singleton_;
};

/// 1.2 x the largest extreme-velocity norm over the domain grid; used when
/// no analytic bound M is known.
double sampled_velocity_bound(const Inclusion& inclusion,
                              const GridSampler& sampler);

/// How a trajectory picks one velocity from V(x_t) at each step.
class Selector {
 public:
  enum class Kind { kFirst, kMixture, kRandom, kAdversarial };

  static Selector first() { return Selector(Kind::kFirst); }
  /// Average of the extreme velocities (a measurable selection into the
  /// convex hull).
  static Selector mixture() { return Selector(Kind::kMixture); }
  static Selector random(std::uint64_t seed);
  /// Picks the extreme velocity maximising <grad objective(x), v>; falls
  /// back to the first extreme where the objective is not differentiable.
  static Selector adversarial(ScalarField objective);

  Kind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  const ScalarField& objective() const noexcept { return objective_; }
  std::string name() const;

  Selector with_seed(std::uint64_t seed) const;

 private:
  explicit Selector(Kind kind) : kind_(kind) {}

  Kind kind_;
  std::uint64_t seed_ = 0;
  ScalarField objective_;
};

/// Inverse of Selector::name(); throws std::invalid_argument.
Selector::Kind selector_kind_from_string(std::string_view name);

Selector adversarial_selector(const Inclusion& inclusion,
                              const ScalarField& objective);

/// Index of the extreme velocity the adversarial rule picks at x.
std::size_t adversarial_pick(const std::vector<Point>& velocities,
                             const ScalarField& objective, const Point& x,
                             const Tolerances& tol = default_tolerances());

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<Point> states;
  std::vector<int> selector_log;  // per step; -1 marks a mixture step
  std::vector<double> w_values;   // optional, one per state

  std::size_t steps() const noexcept { return selector_log.size(); }
  const Point& initial_state() const { return states.front(); }
  const Point& final_state() const { return states.back(); }
};

/// min(0.01, 0.1 / M).
double max_step(const Inclusion& inclusion);

/// Projected explicit Euler: x_{k+1} = P(x_k + dt * v_k) with v_k chosen by
/// the selector. Throws CertError(kStepTooLarge) if dt > max_step and
/// CertError(kLeftDomain) if the projection moves a state by more than
/// 1e-7 * M * dt (an outward-pointing velocity). max_steps truncates the run
/// (used for replays); keep_going(k, x_k), when set, is consulted after each
/// step and ends the run early by returning false.
Trajectory integrate(
    const Inclusion& inclusion, const Point& x0, double horizon, double dt,
    const Selector& selector, const Tolerances& tol = default_tolerances(),
    std::size_t max_steps = static_cast<std::size_t>(-1),
    const std::function<bool(std::size_t, const Point&)>& keep_going = {});

/// d(x_{k+1}, x_k) <= (M + tol_step) * dt on every step.
bool satisfies_lipschitz_bound(const Trajectory& traj, double bound,
                               double tol_step = 1e-9);

/// Columns: t, x1..xA, selector[, W].
void write_csv(std::ostream& os, const Trajectory& traj);

}  // namespace lyapcert
