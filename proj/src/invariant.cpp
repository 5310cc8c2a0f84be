#include "lyapcert/invariant.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lyapcert/parallel.hpp"

namespace lyapcert {

InvariantConstruction construct_invariant_neighborhood(
    const ScalarField& w, const Region& xprime, const Region& target,
    const ConstructionOptions& options) {
  const GridSampler& sampler = options.sampler;
  const Tolerances& tol = options.tol;
  const CompactDomain& domain = xprime.domain();

  const auto closure_pts = xprime.closure_sample(sampler, tol.eps_bd);
  for (const auto& x : closure_pts) {
    if (w(x) < -tol.eps_bd) {
      throw CertError(ErrorCode::kPreconditionFailed,
                      "W is negative on the closure of X'");
    }
  }

  InvariantConstruction out;
  out.strict = options.strict;
  out.diagnostics.h = sampler.h();
  out.diagnostics.covering_radius = sampler.covering_radius(domain);

  const EscapeDistance escape = escape_distance(xprime, target, sampler, tol);
  out.d_bar = escape.d_bar;
  out.d_bar_error = escape.error_bound;
  out.d_bar_argmin = escape.argmin;
  out.diagnostics.complement_samples = escape.complement_samples;

  const SetDistance dstar(target, sampler);
  const ScalarField dstar_field = dstar.as_field();
  out.annulus = xprime.closure(tol.eps_bd).intersect(
      Region::superlevel(domain, dstar_field, 0.5 * out.d_bar, true));

  RegionMinimum wmin;
  try {
    wmin = min_over_region(w, out.annulus, sampler, tol);
  } catch (const CertError& e) {
    if (e.code() != ErrorCode::kEmptyRegion) throw;
    throw CertError(ErrorCode::kEmptyAnnulus,
                    "cl X' with d* >= d_bar/2 has no samples");
  }
  out.w_bar = wmin.value;
  out.w_bar_argmin = wmin.argmin;
  out.diagnostics.annulus_samples = wmin.samples;
  if (!(out.w_bar > tol.eps_bd)) {
    throw CertError(ErrorCode::kNonpositiveLevel,
                    "min of W away from the target is " +
                        std::to_string(out.w_bar) +
                        "; W vanishes outside the target within cl X'");
  }

  out.lipschitz_w =
      w.lipschitz() ? *w.lipschitz() : estimate_lipschitz(w, xprime, sampler, tol);
  const double margin = out.lipschitz_w * out.diagnostics.covering_radius;
  out.w_bar_error = margin;
  out.level = options.strict ? 0.5 * (out.w_bar - margin) : 0.5 * out.w_bar;
  if (!(out.level > 0.0)) {
    throw CertError(ErrorCode::kNonpositiveLevel,
                    "conservative level is not positive; refine the grid");
  }
  // Trajectory escapes are judged against level + L * sqrt(A) * h with L
  // measured on X'' itself; the global constant on X' would swamp small
  // levels.
  const Region bare = Region::sublevel(domain, w, out.level).intersect(xprime);
  double local_l = out.lipschitz_w;
  try {
    local_l = std::min(local_l, estimate_lipschitz(w, bare, sampler, tol));
  } catch (const CertError&) {
  }
  out.escape_slack = local_l * out.diagnostics.covering_radius;
  out.neighbourhood = Region::sublevel(domain, w, out.level, out.escape_slack)
                          .intersect(xprime);

  // Grid assertions of the construction.
  auto& diag = out.diagnostics;
  const auto grid = sampler.samples(domain);
  struct Flags {
    bool escape = false, annulus = false, xpp = false, xpp_far = false;
  };
  std::vector<Flags> flags(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const Point& x = grid[i];
    const double d = dstar.value(x);
    Flags& f = flags[i];
    f.escape = d < out.d_bar && !xprime.contains(x);
    if (d >= 0.5 * out.d_bar && xprime.closure_contains(x, tol.eps_bd)) {
      f.annulus = w(x) < out.w_bar - margin;
    }
    f.xpp = out.neighbourhood.contains(x);
    f.xpp_far = f.xpp && d >= 0.5 * out.d_bar;
  });
  for (const auto& f : flags) {
    diag.escape_implication_violations += f.escape;
    diag.annulus_threshold_violations += f.annulus;
    diag.xpp_samples += f.xpp;
    diag.xpp_distance_violations += f.xpp_far;
  }
  const auto target_pts = target.sample(sampler);
  diag.target_samples = target_pts.size();
  for (const auto& x : target_pts) {
    diag.target_outside_xpp += !out.neighbourhood.contains(x);
  }
  if (diag.escape_implication_violations || diag.annulus_threshold_violations ||
      diag.xpp_distance_violations || diag.target_outside_xpp) {
    throw CertError(ErrorCode::kPreconditionFailed,
                    "grid assertions of the construction failed (target "
                    "outside X'': " +
                        std::to_string(diag.target_outside_xpp) +
                        ", X'' too far: " +
                        std::to_string(diag.xpp_distance_violations) + ")");
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Point> probe_directions(const CompactDomain& domain, double len) {
  std::vector<Point> dirs;
  const int dim = domain.dim();
  if (domain.is_simplex()) {
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        if (i == j) continue;
        Point d = Point::Zero(dim);
        d[i] = len / std::sqrt(2.0);
        d[j] = -len / std::sqrt(2.0);
        dirs.push_back(std::move(d));
      }
    }
    return dirs;
  }
  for (int a = 0; a < dim; ++a) {
    for (double s : {-len, len}) {
      Point d = Point::Zero(dim);
      d[a] = s;
      dirs.push_back(std::move(d));
    }
  }
  return dirs;
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t base, std::size_t index) {
  return splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(index) + 1));
}

std::vector<Point> invariance_starts(const Region& region, std::size_t n,
                                     const GridSampler& sampler,
                                     std::uint64_t seed,
                                     std::size_t* boundary_count) {
  const auto pts = region.sample(sampler);
  if (pts.empty()) {
    throw CertError(ErrorCode::kEmptyRegion,
                    "no samples in " + region.describe());
  }
  const CompactDomain& domain = region.domain();
  const auto dirs = probe_directions(domain, 2.0 * sampler.h());
  std::vector<Point> boundary;
  for (const auto& x : pts) {
    for (const auto& d : dirs) {
      if (!region.contains(x + d)) {
        boundary.push_back(x);
        break;
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order_all(pts.size());
  std::vector<std::size_t> order_bd(boundary.size());
  for (std::size_t i = 0; i < order_all.size(); ++i) order_all[i] = i;
  for (std::size_t i = 0; i < order_bd.size(); ++i) order_bd[i] = i;
  std::shuffle(order_all.begin(), order_all.end(), rng);
  std::shuffle(order_bd.begin(), order_bd.end(), rng);

  const std::size_t n_bd = boundary.empty() ? 0 : n / 2;
  std::uniform_real_distribution<double> u(-0.5 * sampler.h(), 0.5 * sampler.h());
  std::vector<Point> starts;
  starts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point& base = i < n_bd ? boundary[order_bd[i % order_bd.size()]]
                                 : pts[order_all[(i - n_bd) % order_all.size()]];
    Point delta(domain.dim());
    for (int a = 0; a < domain.dim(); ++a) delta[a] = u(rng);
    const Point candidate = base + domain.tangent(delta);
    if (domain.contains(candidate, 0.0) && region.contains(candidate)) {
      starts.push_back(candidate);
    } else {
      starts.push_back(base);
    }
  }
  if (boundary_count) *boundary_count = n_bd;
  return starts;
}

Selector make_selector(Selector::Kind kind, std::uint64_t seed,
                       const ScalarField& objective) {
  switch (kind) {
    case Selector::Kind::kFirst: return Selector::first().with_seed(seed);
    case Selector::Kind::kMixture: return Selector::mixture().with_seed(seed);
    case Selector::Kind::kRandom: return Selector::random(seed);
    case Selector::Kind::kAdversarial:
      return Selector::adversarial(objective).with_seed(seed);
  }
  return Selector::first();
}

InvarianceReport verify_forward_invariance(const Inclusion& inclusion,
                                           const Region& region,
                                           const InvarianceOptions& options) {
  if (options.n_starts == 0) {
    throw std::invalid_argument("verify_forward_invariance: n_starts must be >= 1");
  }
  InvarianceReport report;
  report.starts = invariance_starts(region, options.n_starts, options.sampler,
                                    options.seed, &report.boundary_starts);

  ScalarField objective;
  if (options.adversary_objective) {
    objective = *options.adversary_objective;
  } else {
    const auto pts = region.sample(options.sampler);
    Point centroid = Point::Zero(region.domain().dim());
    for (const auto& p : pts) centroid += p;
    centroid /= static_cast<double>(pts.size());
    objective = fields::norm(centroid);
  }

  const auto& policies = options.policies;
  const std::size_t jobs = report.starts.size() * policies.size();
  const double eps = options.tol.eps_bd;
  std::vector<Verdict> verdicts(jobs);
  parallel_for(jobs, [&](std::size_t idx) {
    const Point& start = report.starts[idx / policies.size()];
    const Selector selector =
        make_selector(policies[idx % policies.size()],
                      trajectory_seed(options.seed, idx), objective);
    TrajectoryRef ref{start, selector.name(), selector.seed(), 0, 0.0};
    Verdict& v = verdicts[idx];
    v.checked = 1;
    Trajectory traj;
    try {
      std::function<bool(std::size_t, const Point&)> keep_going;
      if (options.stop_at_escape) {
        keep_going = [&](std::size_t, const Point& x) {
          return region.closure_contains(x, eps);
        };
      }
      traj = integrate(inclusion, start, options.horizon, options.dt, selector,
                       options.tol, static_cast<std::size_t>(-1), keep_going);
    } catch (const CertError& e) {
      if (e.code() != ErrorCode::kLeftDomain) throw;
      v.add_violation(Witness{"left_domain", start, {}, ref});
      return;
    }
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
      if (!region.closure_contains(traj.states[k], eps)) {
        TrajectoryRef hit = ref;
        hit.step = k;
        hit.t = traj.times[k];
        v.add_violation(Witness{"escape", traj.states[k], {{"t", traj.times[k]}}, hit});
        break;
      }
    }
    if (options.observer) options.observer(idx, traj, ref);
  });

  report.trajectories = jobs;
  report.verdict.status = Status::kPass;
  for (const auto& v : verdicts) merge_into(report.verdict, v);
  if (report.verdict.failed()) {
    report.verdict.reason = std::to_string(report.verdict.violations) +
                            " trajectories left the region";
  } else {
    report.verdict.reason = "invariant (empirical)";
  }
  return report;
}

}  // namespace lyapcert
