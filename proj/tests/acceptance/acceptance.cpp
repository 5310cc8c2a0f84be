// Acceptance criteria 1-7. One line per criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <lyapcert/report.hpp>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace lyapcert;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED[" << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Point kOrigin = Point::Zero(2);

// 1. Closed-form construction on the unit ball at h = 0.005.
void construction_oracle(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const double h = 0.005;
  const auto inst = testinst::linear_contraction();
  ConstructionOptions opts;
  opts.sampler = GridSampler(h);
  const auto c = construct_invariant_neighborhood(inst.w, inst.xprime, inst.target, opts);
  const double radius = std::sqrt(c.level);
  const double elapsed = seconds_since(t0);
  out.detail << "d_bar=" << c.d_bar << " w_bar=" << c.w_bar << " radius=" << radius
             << " time=" << elapsed << "s";
  out.require(c.d_bar >= 1.0 - 2 * h && c.d_bar <= 1.0, "d_bar in [1-2h, 1]");
  out.require(c.w_bar >= 0.25 - 2 * h && c.w_bar <= 0.25, "w_bar in [0.25-2h, 0.25]");
  out.require(radius >= 0.34 && radius <= 0.3536, "radius in [0.34, 0.3536]");
  out.require(elapsed < 10.0, "runtime < 10 s");
}

// 2. Rotation-contraction on the thin rectangle.
void rectangle_gap(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto inst = testinst::rotation_rectangle();
  const GridSampler s(0.01);
  const auto tol = default_tolerances();
  const bool hyp = check_sign_conditions(inst.w, inst.w_tilde, inst.xprime, s).passed() &&
                   check_zero_sets(inst.w, inst.w_tilde, inst.xprime, inst.target, s).passed() &&
                   check_lipschitz(inst.w, inst.xprime, s).passed() &&
                   check_decrease_bound(inst.w, inst.w_tilde, inst.inclusion, inst.xprime, s).passed();
  // The decrease bound holds with equality: 2 x.(Ax) = -0.2 |x|^2.
  double eq_gap = 0.0;
  for (const auto& x : inst.xprime.sample(s)) {
    eq_gap = std::max(eq_gap, std::abs(*directional_decrease(inst.w, x, inst.inclusion.velocities_at(x)[0], tol) -
                                       inst.w_tilde(x)));
  }
  InvarianceOptions io;
  io.n_starts = 500;
  io.horizon = 50.0;
  io.dt = std::min(0.01, max_step(inst.inclusion));
  io.adversary_objective = SetDistance(inst.target, s).as_field();
  const auto escape = verify_forward_invariance(inst.inclusion, inst.xprime, io);

  ConstructionOptions co;
  co.sampler = s;
  const auto c = construct_invariant_neighborhood(inst.w, inst.xprime, inst.target, co);
  const auto inside = verify_forward_invariance(inst.inclusion, c.neighbourhood, io);
  const double elapsed = seconds_since(t0);
  out.detail << "hypotheses=" << (hyp ? "pass" : "fail") << " decrease_gap=" << eq_gap
             << " X'_escapes=" << escape.verdict.violations
             << " X''_witnesses=" << inside.verdict.witnesses.size() << " over "
             << inside.trajectories << " trajectories (" << inside.boundary_starts
             << " boundary starts) time=" << elapsed << "s";
  out.require(hyp, "hypotheses pass");
  out.require(eq_gap <= 1e-12, "decrease equality");
  out.require(escape.verdict.failed() && !escape.verdict.witnesses.empty(), ">=1 escape from X'");
  out.require(inside.verdict.passed() && inside.verdict.witnesses.empty(), "0 witnesses in X''");
  out.require(inside.trajectories >= 2000 && inside.boundary_starts >= 250, "coverage");
  out.require(elapsed < 60.0, "runtime < 60 s");
}

Inclusion vector_field(const std::string& name, Inclusion::VectorField f) {
  const auto d = testinst::square();
  auto inc = Inclusion::from_vector_field(d, name, std::move(f), 1.0);
  return inc.with_bound(sampled_velocity_bound(inc, GridSampler(0.02)));
}

std::vector<Instance> soundness_corpus() {
  const auto d = testinst::square();
  const auto ball = Region::ball(d, {kOrigin}, 1.0, true);
  const auto w = fields::norm_sq(kOrigin);
  const auto rate2 = fields::scaled(w, -2.0).as_decay_rate();
  std::vector<Instance> corpus;
  corpus.push_back(testinst::linear_contraction());
  corpus.push_back(testinst::rotation_rectangle());
  // xdot = -x - x^3 componentwise: DW xdot = -2|x|^2 - 2 sum x_i^4.
  corpus.push_back(Instance{"cubic_damping", testinst::origin(d), ball, w, rate2,
                            vector_field("cubic", [](const Point& x) -> Point {
                              return -x - Point(x.array().cube());
                            })});
  // The coupling terms cancel in DW xdot = -2|x|^2.
  corpus.push_back(Instance{"cross_coupled", testinst::origin(d), ball, w, rate2,
                            vector_field("cross", [](const Point& x) -> Point {
                              return Eigen::Vector2d(-x[0] + x[1] * x[1], -x[1] - x[0] * x[1]);
                            })});
  corpus.push_back(testinst::game_instance(DynamicSpec::Family::kSmith));
  corpus.push_back(testinst::game_instance(DynamicSpec::Family::kBnn));
  return corpus;
}

// 3. Every trajectory from X'' decreases W and converges.
void soundness_sweep(Outcome& out) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& inst : soundness_corpus()) {
    CertifyOptions o;
    o.sampler = GridSampler(0.01);
    o.dt = 1e-3;
    o.tol_conv = 1e-3;
    o.check_xprime_invariance = false;
    const bool game = inst.inclusion.domain().is_simplex();
    o.n_starts = game ? 12 : 40;
    if (game) o.horizon = 200.0;
    const auto cert = certify(inst, o);
    const bool ok = cert.hypotheses_pass() && cert.construction_verdict.passed() &&
                    cert.monotone_decrease.passed() && cert.convergence.passed() &&
                    cert.forward_invariance.passed() && cert.forward_invariance.witnesses.empty();
    out.detail << inst.id << "=" << (ok ? "ok" : "FAIL") << "(" << cert.monotone_decrease.checked
               << " trajectories, T=" << cert.settings.horizon << ") ";
    out.require(ok, inst.id + ": " + cert.conclusion);
  }
  out.detail << "time=" << seconds_since(t0) << "s";
}

bool has_witness(const nlohmann::json& v) {
  return v.at("status") == "fail" && !v.at("witnesses").empty();
}

// 4. Planted defects produce their designated verdicts and replay.
void falsification(Outcome& out, const fs::path& configs) {
  const fs::path scratch = fs::temp_directory_path() / "lyapcert_acceptance";
  fs::remove_all(scratch);
  struct Defect {
    const char* config;
    std::function<const nlohmann::json&(const nlohmann::json&)> verdict;
  };
  const std::vector<Defect> defects = {
      {"defect_sign_flip.json", [](const auto& c) -> const auto& { return c["hypotheses"]["decrease_bound"]; }},
      {"defect_spurious_zero.json", [](const auto& c) -> const auto& { return c["hypotheses"]["zero_sets"]; }},
      {"defect_zero_rate.json", [](const auto& c) -> const auto& { return c["hypotheses"]["zero_sets"]; }},
      {"defect_transitivity_c.json",
       [](const auto& c) -> const auto& { return c["transitivity"]["conditions"]["c"]; }},
  };
  for (const auto& d : defects) {
    const auto result = run(load_config(configs / d.config), scratch / d.config);
    std::ifstream in(result.certificate);
    const auto cert = nlohmann::json::parse(in);
    const auto& v = d.verdict(cert);
    std::ostringstream log;
    const int replayed = replay(result.certificate, log);
    out.detail << d.config << ": " << v["witnesses"].size() << " witnesses, replay="
               << (replayed == 0 ? "ok" : "FAIL") << "; ";
    out.require(has_witness(v), std::string(d.config) + " designated verdict");
    out.require(result.exit_code == kExitHypothesis, std::string(d.config) + " exit 2");
    out.require(replayed == 0, std::string(d.config) + " replay: " + log.str());
  }
  fs::remove_all(scratch);
}

// 5. Nested quadratic transitivity instance.
void transitivity(Outcome& out) {
  const auto inst = testinst::nested_quadratic();
  const GridSampler s(0.01);
  const auto section = check_transitivity_conditions(inst, s);
  bool rescued_ok = !section.rescued_points.empty();
  for (const auto& x : section.rescued_points) {
    rescued_ok = rescued_ok && inst.x1.contains(x) && !inst.x2.contains(x) &&
                 inst.w2_tilde(x) > 0.0 && inst.w1_tilde(x) + inst.w2_tilde(x) <= 0.0;
  }
  CertifyOptions o;
  o.sampler = s;
  o.n_starts = 40;
  o.check_xprime_invariance = false;
  const auto cert = certify_transitive(inst, o, 2.0);
  // Independent scan: composite zeros only within sqrt(A) h of the origin.
  const auto [w, wt] = compose_transitive(inst, 2.0);
  double farthest_zero = 0.0;
  for (const auto& x : inst.x1.closure().sample(s)) {
    if (std::abs(w(x)) <= 1e-12 || std::abs(wt(x)) <= 1e-12) farthest_zero = std::max(farthest_zero, x.norm());
  }
  out.detail << "conditions=" << (section.failed_conditions.empty() ? "pass" : "fail")
             << " rescued=" << section.rescued_points.size()
             << " zero_set_identity=" << to_string(cert.transitivity->zero_set_identity.status)
             << " farthest_zero=" << farthest_zero << " convergence=" << to_string(cert.convergence.status)
             << " overall=" << (cert.overall_pass ? "pass" : "fail");
  out.require(section.failed_conditions.empty(), "conditions");
  out.require(rescued_ok, "rescued point in X1\\X2");
  out.require(cert.transitivity->zero_set_identity.passed(), "composite zero sets");
  out.require(farthest_zero <= std::sqrt(2.0) * 0.01, "zeros near target");
  out.require(cert.construction && cert.convergence.passed() && cert.overall_pass, "convergent X''");
}

// 6. Population games.
void games(Outcome& out) {
  const Point eq = testinst::interior_equilibrium();
  const auto game = PopulationGame::neg_identity(eq);
  const auto d = game.domain();
  const GridSampler s(0.01);
  const bool self_defeating = check_self_defeating(game, Region::whole(d), s).passed();
  const Point nash = oracle::locate_nash([&](const Point& x) { return game.payoff(x); }, 3);

  const auto inst = testinst::game_instance(DynamicSpec::Family::kSmith);
  CertifyOptions o;
  o.sampler = s;
  o.n_starts = 12;
  o.horizon = 200.0;
  o.check_xprime_invariance = false;
  const auto cert = certify(inst, o);
  double worst_final = 0.0;
  const auto starts = invariance_starts(cert.construction->neighbourhood, 12, s, 5);
  const double dt = std::min(1e-3, max_step(inst.inclusion));
  for (const auto& x0 : starts) {
    for (const auto& sel : {Selector::first(), Selector::mixture(), Selector::random(11)}) {
      const auto tr = integrate(inst.inclusion, x0, 200.0, dt, sel);
      worst_final = std::max(worst_final, (tr.final_state() - nash).norm());
    }
  }

  const auto rps = PopulationGame::rps();
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst_form = -1e300;
  const auto xs = oracle::random_simplex_points(3, 10000, 14);
  for (const auto& x : xs) {
    Point z(3);
    for (int i = 0; i < 3; ++i) z[i] = n(rng);
    z.array() -= z.mean();
    z.normalize();
    worst_form = std::max(worst_form, z.dot(rps.jacobian(x) * z));
  }
  const auto br = make_inclusion(rps, DynamicSpec{DynamicSpec::Family::kBestResponse});
  const auto extremes = br.velocities_at(Point::Constant(3, 1.0 / 3));

  out.detail << "self_defeating=" << (self_defeating ? "pass" : "fail") << " oracle_eq=("
             << nash.transpose() << ") certify=" << (cert.overall_pass ? "pass" : "fail")
             << " max|x_T-eq|=" << worst_final << " rps_max_zDFz=" << worst_form
             << " br_extremes=" << extremes.size();
  out.require(self_defeating, "self-defeating externality");
  out.require((nash - eq).norm() <= 1e-6, "oracle equilibrium");
  out.require(cert.overall_pass, "gains candidate certifies");
  out.require(worst_final <= 1e-3, "convergence to oracle equilibrium by T=200");
  out.require(worst_form <= 1e-12, "RPS quadratic form");
  out.require(extremes.size() == 3, "three BR extremes");
}

// 7. Gradients, simplex conservation, first-order convergence.
void hygiene(Outcome& out) {
  const auto box = testinst::square();
  const auto box_pts = oracle::random_box_points(box.lo(), box.hi(), 10000, 71);
  const auto simplex_pts = oracle::random_simplex_points(3, 10000, 72);
  const auto game = PopulationGame::neg_identity(testinst::interior_equilibrium());
  Eigen::Matrix2d q;
  q << 2.0, 0.5, 0.5, 1.0;
  const auto nested = testinst::nested_quadratic();
  std::vector<std::pair<ScalarField, const std::vector<Point>*>> cases = {
      {fields::norm_sq(kOrigin), &box_pts},
      {fields::quadratic(q, Eigen::Vector2d(0.1, 0.2)), &box_pts},
      {fields::product(fields::coordinate(0), fields::coordinate(1)), &box_pts},
      {nested.w1, &box_pts},
      {compose_transitive(nested).first, &box_pts},
      {gains_lyapunov_candidates(game, DynamicSpec{DynamicSpec::Family::kSmith}).w, &simplex_pts},
      {gains_lyapunov_candidates(game, DynamicSpec{DynamicSpec::Family::kBnn}).w, &simplex_pts},
  };
  double worst_fraction = 1.0;
  for (const auto& [f, pts] : cases) {
    std::size_t good = 0;
    for (const auto& x : *pts) {
      const auto g = grad(f, x);
      if (!g) continue;
      const Point ref = oracle::central_gradient([&](const Point& y) { return f(y); }, x, 1e-5);
      const double rel = (*g - ref).lpNorm<Eigen::Infinity>() / std::max(1.0, ref.lpNorm<Eigen::Infinity>());
      if (rel <= 1e-6) ++good;
    }
    const double fraction = static_cast<double>(good) / pts->size();
    worst_fraction = std::min(worst_fraction, fraction);
    out.require(fraction >= 0.99, "gradient of " + f.name());
  }

  double worst_sum = 0.0;
  for (const auto& g : {game, PopulationGame::rps(), PopulationGame::coordination(3)}) {
    for (auto family : {DynamicSpec::Family::kBestResponse, DynamicSpec::Family::kTemperedBestResponse,
                        DynamicSpec::Family::kSmith, DynamicSpec::Family::kBnn,
                        DynamicSpec::Family::kReplicator}) {
      const auto inc = make_inclusion(g, DynamicSpec{family});
      const double dt = std::min(1e-2, max_step(inc));
      for (std::size_t k = 0; k < 5; ++k) {
        for (const auto& sel : {Selector::first(), Selector::mixture(), Selector::random(k)}) {
          const auto tr = integrate(inc, simplex_pts[k], 10.0, dt, sel);
          for (const auto& x : tr.states) worst_sum = std::max(worst_sum, std::abs(x.sum() - 1.0));
        }
      }
    }
  }
  out.require(worst_sum <= 1e-9, "simplex conservation");

  // Gap between dt and dt/2 solutions; C frozen at 0.5.
  double worst_ratio = 0.0;
  bool first_order = true;
  for (const auto& a : {Eigen::Matrix2d(-Eigen::Matrix2d::Identity()), testinst::rotation_matrix()}) {
    const auto inc = testinst::linear_field(box, a, "linear");
    const Point x0 = Eigen::Vector2d(0.8, 0.5);
    double prev = 0.0;
    for (double dt : {0.01, 0.005, 0.0025}) {
      const Point coarse = integrate(inc, x0, 2.0, dt, Selector::first()).final_state();
      const Point fine = integrate(inc, x0, 2.0, dt / 2, Selector::first()).final_state();
      const double gap = (coarse - fine).norm();
      worst_ratio = std::max(worst_ratio, gap / dt);
      if (prev > 0.0) first_order = first_order && std::abs(prev / gap - 2.0) <= 0.2;
      prev = gap;
    }
  }
  out.require(worst_ratio <= 0.5 && first_order, "step halving");
  out.detail << "min_gradient_agreement=" << worst_fraction << " max|sum x-1|=" << worst_sum
             << " max_gap/dt=" << worst_ratio << " first_order=" << (first_order ? "yes" : "no");
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path configs = argc > 1 ? fs::path(argv[1]) : fs::path(LYAPCERT_CONFIG_DIR);
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"construction oracle", construction_oracle},
      {"invariance gap on the thin rectangle", rectangle_gap},
      {"soundness sweep", soundness_sweep},
      {"falsification sensitivity", [&](Outcome& o) { falsification(o, configs); }},
      {"transitivity end-to-end", transitivity},
      {"game application", games},
      {"numerical hygiene", hygiene},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    try {
      criteria[i].second(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " exception: " << e.what();
    }
    if (!out.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s\n", out.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), out.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
