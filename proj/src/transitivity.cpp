#include "lyapcert/transitivity.hpp"

#include <vector>

#include "lyapcert/parallel.hpp"

namespace lyapcert {

namespace {

Verdict sign_check(const ScalarField& f, const std::vector<Point>& pts,
                   bool nonnegative, const char* check, const Tolerances& tol) {
  std::vector<double> values(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { values[i] = f(pts[i]); });
  Verdict v;
  v.checked = pts.size();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double excess = nonnegative ? -values[i] : values[i];
    if (excess > tol.eps_num) {
      v.worst = std::max(v.worst, excess);
      v.add_violation(Witness{check, pts[i], {{f.name(), values[i]}}, {}});
    }
  }
  v.reason = v.passed() ? "holds on all samples"
                        : std::to_string(v.violations) + " violations";
  return v;
}

std::vector<Point> nonempty_samples(const Region& r, const GridSampler& s,
                                    const char* name) {
  auto pts = r.sample(s);
  if (pts.empty()) {
    throw CertError(ErrorCode::kEmptyRegion, std::string(name) + " has no samples");
  }
  return pts;
}

template <typename F>
Verdict guarded(F&& check) {
  try {
    return check();
  } catch (const CertError& e) {
    if (e.code() != ErrorCode::kTooManyKinks) throw;
    return Verdict::fail(e.what());
  }
}

}  // namespace

TransitivitySection check_transitivity_conditions(
    const TransitivityInstance& inst, const GridSampler& sampler,
    const Tolerances& tol) {
  const auto x1 = nonempty_samples(inst.x1, sampler, "X1");
  const auto x2 = nonempty_samples(inst.x2, sampler, "X2");

  TransitivitySection out;
  auto& c = out.conditions;
  c.emplace_back("a-i", sign_check(inst.w1, x1, true, "a-i", tol));
  c.emplace_back("a-ii", sign_check(inst.w1_tilde, x1, false, "a-ii", tol));
  c.emplace_back("a-iii", check_zero_sets(inst.w1, inst.w1_tilde, inst.x1,
                                          inst.x2.closure(tol.eps_bd), sampler, tol));
  c.emplace_back("a-iv", guarded([&] {
                   return check_decrease_bound(inst.w1, inst.w1_tilde,
                                               inst.inclusion, inst.x1, sampler, tol);
                 }));
  c.emplace_back("b-i", sign_check(inst.w2, x1, true, "b-i", tol));
  c.emplace_back("b-ii", sign_check(inst.w2_tilde, x2, false, "b-ii", tol));
  c.emplace_back("b-iii", check_zero_sets(inst.w2, inst.w2_tilde, inst.x2,
                                          inst.target, sampler, tol));
  c.emplace_back("b-iv", guarded([&] {
                   return check_decrease_bound(inst.w2, inst.w2_tilde,
                                               inst.inclusion, inst.x1, sampler, tol);
                 }));

  Verdict cv;
  cv.checked = x1.size();
  std::vector<double> t1(x1.size()), t2(x1.size());
  parallel_for(x1.size(), [&](std::size_t i) {
    t1[i] = inst.w1_tilde(x1[i]);
    t2[i] = inst.w2_tilde(x1[i]);
  });
  for (std::size_t i = 0; i < x1.size(); ++i) {
    const double s = t1[i] + t2[i];
    if (s > tol.eps_num) {
      cv.worst = std::max(cv.worst, s);
      cv.add_violation(Witness{"c", x1[i],
                               {{"W1_tilde", t1[i]}, {"W2_tilde", t2[i]}, {"sum", s}},
                               {}});
    } else if (t2[i] > tol.eps_num && !inst.x2.contains(x1[i])) {
      out.rescued_points.push_back(x1[i]);
    }
  }
  cv.reason = cv.passed() ? "W1~ + W2~ <= 0 on X1"
                          : std::to_string(cv.violations) + " violations";
  c.emplace_back("c", std::move(cv));

  for (const auto& [name, verdict] : c) {
    if (!verdict.passed()) out.failed_conditions.push_back(name);
  }
  return out;
}

std::pair<ScalarField, ScalarField> compose_transitive(
    const TransitivityInstance& inst, double kappa, const Tolerances& tol) {
  const ScalarField w1 = inst.w1, w2 = inst.w2;
  ScalarField w(
      "composite W",
      [w1, w2, kappa](const Point& x) { return kappa * w1(x) + w2(x); },
      [w1, w2, kappa, tol](const Point& x) -> std::optional<Point> {
        auto g1 = grad(w1, x, tol);
        if (!g1) return std::nullopt;
        auto g2 = grad(w2, x, tol);
        if (!g2) return std::nullopt;
        return Point(kappa * *g1 + *g2);
      });
  const ScalarField t1 = inst.w1_tilde, t2 = inst.w2_tilde;
  ScalarField wt(
      "composite W~",
      [t1, t2, kappa](const Point& x) { return kappa * t1(x) + t2(x); }, {},
      Smoothness::kLowerSemicontinuous);
  return {std::move(w), std::move(wt)};
}

Certificate certify_transitive(const TransitivityInstance& inst,
                               const CertifyOptions& options, double kappa) {
  TransitivitySection section =
      check_transitivity_conditions(inst, options.sampler, options.tol);
  section.kappa = kappa;
  auto [w, wt] = compose_transitive(inst, kappa, options.tol);
  section.zero_set_identity =
      check_zero_sets(w, wt, inst.x1, inst.target, options.sampler, options.tol);

  if (section.failed_conditions.empty()) {
    Certificate cert =
        certify(Instance{inst.id, inst.target, inst.x1, w, wt, inst.inclusion},
                options);
    if (!section.zero_set_identity.passed()) {
      cert.overall_pass = false;
      cert.conclusion = "not certified";
    }
    cert.transitivity = std::move(section);
    return cert;
  }

  Certificate cert;
  cert.instance_id = inst.id;
  std::string failed;
  for (const auto& name : section.failed_conditions) {
    failed += (failed.empty() ? "" : ", ") + name;
  }
  const std::string reason = "transitivity conditions failed: " + failed;
  cert.sign_conditions = Verdict::skipped(reason);
  cert.zero_sets = section.zero_set_identity;
  cert.lipschitz_w = Verdict::skipped(reason);
  cert.decrease_bound = Verdict::skipped(reason);
  cert.construction_verdict = Verdict::skipped(reason);
  cert.forward_invariance = Verdict::skipped(reason);
  cert.monotone_decrease = Verdict::skipped(reason);
  cert.convergence = Verdict::skipped(reason);
  cert.xprime_invariance = Verdict::skipped(reason);
  cert.settings.h = options.sampler.h();
  cert.settings.dt = options.dt;
  cert.settings.n_starts = options.n_starts;
  cert.settings.seed = options.seed;
  cert.settings.tol_conv = options.tol_conv;
  cert.settings.strict_level = options.strict_level;
  cert.settings.lipschitz_cap = options.lipschitz_cap;
  cert.settings.tol = options.tol;
  cert.overall_pass = false;
  cert.conclusion = "not certified (" + reason + ")";
  cert.transitivity = std::move(section);
  return cert;
}

}  // namespace lyapcert
