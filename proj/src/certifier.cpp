#include "lyapcert/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lyapcert/parallel.hpp"

namespace lyapcert {

namespace {

std::vector<Point> require_samples(const Region& region,
                                   const GridSampler& sampler) {
  auto pts = region.sample(sampler);
  if (pts.empty()) {
    throw CertError(ErrorCode::kEmptyRegion,
                    "no samples in " + region.describe());
  }
  return pts;
}

std::vector<Point> search_directions(const CompactDomain& domain) {
  std::vector<Point> dirs;
  const int dim = domain.dim();
  for (int i = 0; i < dim; ++i) {
    if (domain.is_simplex()) {
      for (int j = 0; j < dim; ++j) {
        if (i == j) continue;
        Point d = Point::Zero(dim);
        d[i] = 1.0;
        d[j] = -1.0;
        dirs.push_back(d / std::sqrt(2.0));
      }
    } else {
      for (double s : {-1.0, 1.0}) {
        Point d = Point::Zero(dim);
        d[i] = s;
        dirs.push_back(std::move(d));
      }
    }
  }
  return dirs;
}

// Compass search for a minimum of f over the feasible set, starting at x0.
template <typename F, typename Feasible>
std::pair<Point, double> compass_minimise(const F& f, Point x, double step,
                                          const Feasible& feasible,
                                          const std::vector<Point>& dirs) {
  double fx = f(x);
  for (int iter = 0; iter < 4000 && step > 1e-9; ++iter) {
    bool improved = false;
    for (const auto& d : dirs) {
      const Point y = x + step * d;
      if (!feasible(y)) continue;
      const double fy = f(y);
      if (fy < fx) {
        x = y;
        fx = fy;
        improved = true;
        break;
      }
    }
    if (!improved) step *= 0.5;
  }
  return {x, fx};
}

}  // namespace

Verdict check_sign_conditions(const ScalarField& w, const ScalarField& w_tilde,
                              const Region& xprime, const GridSampler& sampler,
                              const Tolerances& tol) {
  const auto pts = require_samples(xprime, sampler);
  std::vector<double> wv(pts.size()), tv(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    wv[i] = w(pts[i]);
    tv[i] = w_tilde(pts[i]);
  });
  Verdict v;
  v.checked = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (wv[i] < -tol.eps_num) {
      v.worst = std::max(v.worst, -wv[i]);
      v.add_violation(Witness{"sign.W", pts[i], {{"W", wv[i]}}, {}});
    }
    if (tv[i] > tol.eps_num) {
      v.worst = std::max(v.worst, tv[i]);
      v.add_violation(Witness{"sign.W_tilde", pts[i], {{"W_tilde", tv[i]}}, {}});
    }
  }
  v.reason = v.passed() ? "W >= 0 and W~ <= 0 on X'"
                        : std::to_string(v.violations) + " sign violations";
  return v;
}

Verdict check_zero_sets(const ScalarField& w, const ScalarField& w_tilde,
                        const Region& xprime, const Region& target,
                        const GridSampler& sampler, const Tolerances& tol) {
  const CompactDomain& domain = xprime.domain();
  const SetDistance dstar(target, sampler);
  const double band = sampler.covering_radius(domain) + dstar.error_bound();
  Verdict v;

  const auto target_pts = target.sample(sampler);
  if (target_pts.empty()) {
    throw CertError(ErrorCode::kEmptyRegion, "target has no samples");
  }
  for (const auto& x : target_pts) {
    ++v.checked;
    const double wx = w(x);
    const double tx = w_tilde(x);
    if (std::abs(wx) > tol.eps_num) {
      v.worst = std::max(v.worst, std::abs(wx));
      v.add_violation(Witness{"zero.target.W", x, {{"W", wx}}, {}});
    }
    if (std::abs(tx) > tol.eps_num) {
      v.worst = std::max(v.worst, std::abs(tx));
      v.add_violation(Witness{"zero.target.W_tilde", x, {{"W_tilde", tx}}, {}});
    }
  }

  auto off_target = [&](const Point& x) {
    return domain.contains(x, 0.0) && xprime.closure_contains(x, tol.eps_bd) &&
           !target.closure_contains(x, tol.eps_bd) && dstar.value(x) > band;
  };
  std::vector<Point> pts;
  for (auto& x : xprime.closure_sample(sampler, tol.eps_bd)) {
    if (off_target(x)) pts.push_back(std::move(x));
  }
  if (pts.empty()) {
    throw CertError(ErrorCode::kEmptyRegion,
                    "cl X' has no samples away from the target");
  }
  std::vector<double> wv(pts.size()), tv(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    wv[i] = w(pts[i]);
    tv[i] = w_tilde(pts[i]);
  });
  v.checked += pts.size();
  bool w_flagged = false, t_flagged = false;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(wv[i] > tol.eps_num)) {
      w_flagged = true;
      v.worst = std::max(v.worst, tol.eps_num - wv[i]);
      v.add_violation(Witness{"zero.W", pts[i], {{"W", wv[i]}}, {}});
    }
    if (!(tv[i] < -tol.eps_num)) {
      t_flagged = true;
      v.worst = std::max(v.worst, tv[i] + tol.eps_num);
      v.add_violation(Witness{"zero.W_tilde", pts[i], {{"W_tilde", tv[i]}}, {}});
    }
  }

  // Zeros between grid points: polish grid-local minima of W and of -W~.
  const auto offsets = sampler.neighbour_offsets(domain);
  const auto dirs = search_directions(domain);
  auto polish = [&](const auto& f, const std::vector<double>& values,
                    const char* check, const char* key, bool already) {
    if (already) return;
    std::vector<std::size_t> minima;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      bool local_min = true;
      for (const auto& off : offsets) {
        const Point y = pts[i] + off;
        if (off_target(y) && f(y) < values[i]) {
          local_min = false;
          break;
        }
      }
      if (local_min) minima.push_back(i);
    }
    std::sort(minima.begin(), minima.end(), [&](std::size_t a, std::size_t b) {
      return values[a] < values[b];
    });
    if (minima.size() > 64) minima.resize(64);
    for (std::size_t i : minima) {
      auto [x, fx] = compass_minimise(f, pts[i], 0.5 * sampler.h(), off_target, dirs);
      if (fx <= tol.eps_num) {
        v.add_violation(Witness{check, x, {{key, std::string(key) == "W" ? fx : -fx}}, {}});
        return;
      }
    }
  };
  polish([&](const Point& x) { return w(x); }, wv, "zero.W", "W", w_flagged);
  std::vector<double> neg_tv(tv.size());
  std::transform(tv.begin(), tv.end(), neg_tv.begin(), [](double t) { return -t; });
  polish([&](const Point& x) { return -w_tilde(x); }, neg_tv, "zero.W_tilde",
         "W_tilde", t_flagged);

  v.reason = v.passed()
                 ? "zero sets of W and W~ coincide with the target"
                 : std::to_string(v.violations) + " zero-set violations";
  return v;
}

Verdict check_lipschitz(const ScalarField& w, const Region& xprime,
                        const GridSampler& sampler, double cap,
                        const Tolerances& tol) {
  const auto est = lipschitz_estimate(w, xprime, sampler, tol);
  Verdict v;
  v.checked = 1;
  v.worst = est.inflated;
  if (!std::isfinite(est.inflated) || est.inflated > cap) {
    Witness wit{"lipschitz", est.x, {{"slope", est.raw}}, {}};
    for (Eigen::Index a = 0; a < est.y.size(); ++a) {
      wit.values.emplace_back("partner" + std::to_string(a), est.y[a]);
    }
    v.add_violation(std::move(wit));
    v.reason = "Lipschitz estimate exceeds cap";
  } else {
    v.reason = "Lipschitz estimate " + std::to_string(est.inflated);
  }
  return v;
}

Verdict check_decrease_bound(const ScalarField& w, const ScalarField& w_tilde,
                             const Inclusion& inclusion, const Region& xprime,
                             const GridSampler& sampler,
                             const Tolerances& tol) {
  const auto pts = require_samples(xprime, sampler);
  struct PointResult {
    bool kink = false;
    double worst_gap = -std::numeric_limits<double>::infinity();
    std::size_t worst_index = 0;
    double rate = 0.0;
    double bound = 0.0;
  };
  std::vector<PointResult> results(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto g = grad(w, pts[i], tol);
    PointResult& r = results[i];
    if (!g) {
      r.kink = true;
      return;
    }
    r.bound = w_tilde(pts[i]);
    const auto velocities = inclusion.velocities_at(pts[i]);
    for (std::size_t j = 0; j < velocities.size(); ++j) {
      const double rate = g->dot(velocities[j]);
      if (rate - r.bound > r.worst_gap) {
        r.worst_gap = rate - r.bound;
        r.worst_index = j;
        r.rate = rate;
      }
    }
  });
  Verdict v;
  v.checked = pts.size();
  v.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& r = results[i];
    if (r.kink) {
      ++v.skipped_points;
      continue;
    }
    v.worst = std::max(v.worst, r.worst_gap);
    if (r.worst_gap > tol.eps_num) {
      v.add_violation(Witness{"decrease",
                              pts[i],
                              {{"rate", r.rate},
                               {"W_tilde", r.bound},
                               {"velocity", static_cast<double>(r.worst_index)}},
                              {}});
    }
  }
  const double kink_fraction =
      static_cast<double>(v.skipped_points) / static_cast<double>(pts.size());
  if (kink_fraction > tol.max_kink_fraction) {
    throw CertError(ErrorCode::kTooManyKinks,
                    std::to_string(v.skipped_points) + " of " +
                        std::to_string(pts.size()) +
                        " samples are nondifferentiable");
  }
  v.reason = v.passed() ? "DW(x) v <= W~(x) at every extreme velocity"
                        : std::to_string(v.violations) + " decrease violations";
  return v;
}

namespace {

double gradient_lipschitz(const ScalarField& w, const Region& region,
                          const GridSampler& sampler, const Tolerances& tol) {
  const auto pts = require_samples(region, sampler);
  const auto offsets = sampler.neighbour_offsets(region.domain());
  std::vector<double> best(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t i) {
    const auto gx = grad(w, pts[i], tol);
    if (!gx) return;
    for (const auto& off : offsets) {
      const Point y = pts[i] + off;
      if (!region.contains(y)) continue;
      const auto gy = grad(w, y, tol);
      if (!gy) continue;
      best[i] = std::max(best[i], (*gx - *gy).norm() / off.norm());
    }
  });
  return tol.lipschitz_inflation * *std::max_element(best.begin(), best.end());
}

}  // namespace

DecreaseTolerance decrease_tolerance(const ScalarField& w,
                                     const ScalarField& w_tilde,
                                     const Inclusion& inclusion,
                                     const Region& region,
                                     const GridSampler& sampler,
                                     const Tolerances& tol) {
  const double m = inclusion.bound();
  const double l_rate = estimate_lipschitz(w_tilde, region, sampler, tol);
  const double l_grad = gradient_lipschitz(w, region, sampler, tol);
  DecreaseTolerance out;
  out.c_tol = m * l_rate + m * m * l_grad;
  return out;
}

Verdict verify_monotone_decrease(const Trajectory& traj, const ScalarField& w,
                                 const ScalarField& w_tilde,
                                 const DecreaseTolerance& slack,
                                 const std::optional<TrajectoryRef>& ref) {
  Verdict v;
  v.checked = 1;
  const std::size_t n = traj.states.size();
  if (n == 0) return v;
  const double step_tol = slack.per_step(traj.dt);
  double w_prev = w(traj.states[0]);
  const double w0 = w_prev;
  double integral = 0.0;
  bool reported = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double rate = w_tilde(traj.states[k]);
    const double w_next = w(traj.states[k + 1]);
    const double excess = (w_next - w_prev) - (traj.dt * rate + step_tol);
    integral += traj.dt * rate;
    if (excess > 0.0) {
      v.worst = std::max(v.worst, excess);
      if (!reported) {
        TrajectoryRef r = ref.value_or(TrajectoryRef{traj.states[0], "", 0, 0, 0.0});
        r.step = k + 1;
        r.t = traj.times[k + 1];
        v.add_violation(Witness{"monotone.step",
                                traj.states[k + 1],
                                {{"dW", w_next - w_prev},
                                 {"bound", traj.dt * rate + step_tol}},
                                r});
        reported = true;
      } else {
        ++v.violations;
      }
    }
    w_prev = w_next;
  }
  const double cumulative_bound =
      w0 + integral + static_cast<double>(n - 1) * step_tol;
  if (w_prev > cumulative_bound) {
    TrajectoryRef r = ref.value_or(TrajectoryRef{traj.states[0], "", 0, 0, 0.0});
    r.step = n - 1;
    r.t = traj.times[n - 1];
    v.worst = std::max(v.worst, w_prev - cumulative_bound);
    v.add_violation(Witness{"monotone.cumulative",
                            traj.states[n - 1],
                            {{"W_T", w_prev}, {"bound", cumulative_bound}},
                            r});
  }
  return v;
}

Verdict verify_convergence(const Trajectory& traj, const SetDistance& dstar,
                           double tol_conv,
                           const std::optional<TrajectoryRef>& ref) {
  Verdict v;
  v.checked = 1;
  if (traj.states.empty()) return v;
  auto make_ref = [&](std::size_t k) {
    TrajectoryRef r = ref.value_or(TrajectoryRef{traj.states[0], "", 0, 0, 0.0});
    r.step = k;
    r.t = traj.times[k];
    return r;
  };
  bool crossed = false;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double d = dstar.value(traj.states[k]);
    if (!crossed && d <= tol_conv) crossed = true;
    if (crossed && d > 2.0 * tol_conv) {
      v.worst = std::max(v.worst, d);
      v.add_violation(Witness{"convergence.excursion", traj.states[k],
                              {{"d*", d}}, make_ref(k)});
      return v;
    }
  }
  const std::size_t last = traj.states.size() - 1;
  const double d_final = dstar.value(traj.states[last]);
  v.worst = std::max(v.worst, d_final);
  if (d_final > tol_conv) {
    v.add_violation(Witness{"convergence.final", traj.states[last],
                            {{"d*", d_final}}, make_ref(last)});
  }
  return v;
}

Verdict verify_convergence(const std::vector<Trajectory>& trajs,
                           const SetDistance& dstar, double tol_conv) {
  Verdict out;
  for (const auto& t : trajs) merge_into(out, verify_convergence(t, dstar, tol_conv));
  out.reason = out.passed() ? "all trajectories converge"
                            : std::to_string(out.violations) +
                                  " trajectories fail to converge";
  return out;
}

bool Certificate::hypotheses_pass() const {
  return sign_conditions.passed() && zero_sets.passed() &&
         lipschitz_w.passed() && decrease_bound.passed();
}

bool Certificate::trajectories_pass() const {
  return forward_invariance.passed() && monotone_decrease.passed() &&
         convergence.passed();
}

double default_horizon(const InvariantConstruction& construction,
                       const ScalarField& w, const ScalarField& w_tilde,
                       const SetDistance& dstar, const GridSampler& sampler,
                       double max_horizon, const Tolerances& tol) {
  const double band =
      sampler.covering_radius(construction.neighbourhood.domain()) +
      dstar.error_bound();
  double rate = std::numeric_limits<double>::infinity();
  for (const auto& x : construction.neighbourhood.sample(sampler)) {
    const double wx = w(x);
    if (wx <= tol.eps_num || dstar.value(x) <= band) continue;
    rate = std::min(rate, -w_tilde(x) / wx);
  }
  if (!std::isfinite(rate) || rate <= 0.0) return std::min(20.0, max_horizon);
  return std::clamp(20.0 / rate, 1.0, max_horizon);
}

Certificate certify(const Instance& instance, const CertifyOptions& options) {
  const Tolerances& tol = options.tol;
  const GridSampler& sampler = options.sampler;
  Certificate cert;
  cert.instance_id = instance.id;

  cert.sign_conditions = check_sign_conditions(instance.w, instance.w_tilde,
                                               instance.xprime, sampler, tol);
  cert.zero_sets = check_zero_sets(instance.w, instance.w_tilde, instance.xprime,
                                   instance.target, sampler, tol);
  cert.lipschitz_w = check_lipschitz(instance.w, instance.xprime, sampler,
                                     options.lipschitz_cap, tol);
  try {
    cert.decrease_bound =
        check_decrease_bound(instance.w, instance.w_tilde, instance.inclusion,
                             instance.xprime, sampler, tol);
  } catch (const CertError& e) {
    if (e.code() != ErrorCode::kTooManyKinks) throw;
    cert.decrease_bound = Verdict::fail(e.what());
  }

  RunSettings& s = cert.settings;
  s.h = sampler.h();
  s.dt = std::min(options.dt, max_step(instance.inclusion));
  s.n_starts = options.n_starts;
  s.seed = options.seed;
  s.tol_conv = options.tol_conv;
  s.strict_level = options.strict_level;
  s.lipschitz_cap = options.lipschitz_cap;
  s.tol = tol;
  for (auto k : options.policies) {
    s.policies.push_back(make_selector(k, 0, fields::constant(0)).name());
  }

  try {
    ConstructionOptions copts{sampler, options.strict_level, tol};
    cert.construction = construct_invariant_neighborhood(
        instance.w, instance.xprime, instance.target, copts);
    cert.construction_verdict.status = Status::kPass;
    cert.construction_verdict.checked = 1;
    cert.construction_verdict.reason = "X'' constructed";
  } catch (const CertError& e) {
    cert.construction_verdict = Verdict::fail(e.what());
  }

  const SetDistance dstar(instance.target, sampler);
  const ScalarField dstar_field = dstar.as_field();

  if (cert.construction) {
    s.horizon = options.horizon
                    ? *options.horizon
                    : default_horizon(*cert.construction, instance.w,
                                      instance.w_tilde, dstar, sampler,
                                      options.max_horizon, tol);
    const DecreaseTolerance slack =
        decrease_tolerance(instance.w, instance.w_tilde, instance.inclusion,
                           instance.xprime, sampler, tol);
    s.c_tol = slack.c_tol;

    const std::size_t jobs = options.n_starts * options.policies.size();
    std::vector<Verdict> monotone(jobs), converge(jobs);
    cert.trajectories.resize(std::min(jobs, options.keep_trajectories));
    InvarianceOptions iopts;
    iopts.n_starts = options.n_starts;
    iopts.horizon = s.horizon;
    iopts.dt = s.dt;
    iopts.policies = options.policies;
    iopts.seed = options.seed;
    iopts.sampler = sampler;
    iopts.adversary_objective = dstar_field;
    iopts.tol = tol;
    iopts.observer = [&](std::size_t idx, const Trajectory& traj,
                         const TrajectoryRef& ref) {
      monotone[idx] = verify_monotone_decrease(traj, instance.w,
                                               instance.w_tilde, slack, ref);
      converge[idx] = verify_convergence(traj, dstar, options.tol_conv, ref);
      if (idx < cert.trajectories.size()) cert.trajectories[idx] = {ref, traj};
    };
    const auto report = verify_forward_invariance(
        instance.inclusion, cert.construction->neighbourhood, iopts);
    cert.forward_invariance = report.verdict;
    cert.monotone_decrease.status = Status::kPass;
    cert.convergence.status = Status::kPass;
    std::size_t aborted = 0;
    for (std::size_t i = 0; i < jobs; ++i) {
      // Trajectories that left the domain never reach the observer.
      if (monotone[i].checked == 0) {
        ++aborted;
        merge_into(cert.monotone_decrease, Verdict::fail("trajectory aborted"));
        merge_into(cert.convergence, Verdict::fail("trajectory aborted"));
        continue;
      }
      merge_into(cert.monotone_decrease, monotone[i]);
      merge_into(cert.convergence, converge[i]);
    }
    cert.monotone_decrease.reason =
        cert.monotone_decrease.passed()
            ? "decrease inequalities hold along every trajectory"
            : std::to_string(cert.monotone_decrease.violations) +
                  " decrease violations";
    cert.convergence.reason =
        cert.convergence.passed()
            ? "every trajectory converges to the target"
            : std::to_string(cert.convergence.violations) +
                  " convergence failures";
    if (aborted > 0) {
      const std::string note = ", " + std::to_string(aborted) +
                               " trajectories left the domain";
      cert.monotone_decrease.reason += note;
      cert.convergence.reason += note;
    }
  } else {
    cert.forward_invariance = Verdict::skipped("no X'' constructed");
    cert.monotone_decrease = Verdict::skipped("no X'' constructed");
    cert.convergence = Verdict::skipped("no X'' constructed");
  }

  if (options.check_xprime_invariance) {
    InvarianceOptions iopts;
    iopts.n_starts = options.n_starts;
    iopts.horizon = s.horizon > 0.0 ? s.horizon : 20.0;
    iopts.dt = s.dt;
    iopts.policies = options.policies;
    iopts.seed = options.seed;
    iopts.sampler = sampler;
    iopts.adversary_objective = dstar_field;
    iopts.stop_at_escape = true;
    iopts.tol = tol;
    try {
      cert.xprime_invariance =
          verify_forward_invariance(instance.inclusion, instance.xprime, iopts)
              .verdict;
      cert.xprime_invariance.reason =
          cert.xprime_invariance.passed()
              ? "X' invariant (empirical; informational)"
              : "X' is not forward invariant (informational)";
    } catch (const CertError& e) {
      cert.xprime_invariance = Verdict::skipped(e.what());
    }
  } else {
    cert.xprime_invariance = Verdict::skipped("not requested");
  }

  cert.overall_pass = cert.hypotheses_pass() &&
                      cert.construction_verdict.passed() &&
                      cert.trajectories_pass();
  cert.conclusion = cert.overall_pass
                        ? "asymptotically stable (empirical), basin contains X''"
                        : "not certified";
  return cert;
}

}  // namespace lyapcert
