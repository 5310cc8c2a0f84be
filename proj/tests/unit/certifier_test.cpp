#include <algorithm>
#include <chrono>

#include <gtest/gtest.h>

#include "support/instances.hpp"

using namespace lyapcert;

namespace {

CertifyOptions quick() {
  CertifyOptions o;
  o.sampler = GridSampler(0.02);
  o.dt = 0.01;
  o.n_starts = 20;
  return o;
}

}  // namespace

TEST(SignConditions, Examples) {
  const auto inst = testinst::linear_contraction();
  const GridSampler s(0.02);
  EXPECT_TRUE(check_sign_conditions(inst.w, inst.w_tilde, inst.xprime, s).passed());
  auto bad = check_sign_conditions(inst.w, fields::norm_sq(Point::Zero(2)),
                                   inst.xprime, s);
  ASSERT_TRUE(bad.failed());
  EXPECT_EQ(bad.witnesses.front().check, "sign.W_tilde");
  auto neg = check_sign_conditions(fields::coordinate(0), inst.w_tilde,
                                   inst.xprime, s);
  ASSERT_TRUE(neg.failed());
  EXPECT_LT(neg.witnesses.front().point[0], 0.0);
}

TEST(ZeroSets, Examples) {
  const auto inst = testinst::linear_contraction();
  const GridSampler s(0.02);
  EXPECT_TRUE(check_zero_sets(inst.w, inst.w_tilde, inst.xprime, inst.target, s).passed());

  const auto r2 = fields::norm_sq(Point::Zero(2));
  const auto circle = fields::square(fields::shifted(r2, -0.25));
  auto v = check_zero_sets(circle, inst.w_tilde, inst.xprime, inst.target, s);
  ASSERT_TRUE(v.failed());
  const auto it = std::find_if(v.witnesses.begin(), v.witnesses.end(),
                               [](const Witness& w) { return w.check == "zero.W"; });
  ASSERT_NE(it, v.witnesses.end());
  EXPECT_NEAR(it->point.norm(), 0.5, 0.05);

  auto flat = check_zero_sets(inst.w, fields::constant(0.0), inst.xprime,
                              inst.target, s);
  ASSERT_TRUE(flat.failed());
  EXPECT_EQ(flat.witnesses.front().check, "zero.W_tilde");
}

TEST(ZeroSets, ZeroBetweenGridPointsIsFound) {
  const auto inst = testinst::linear_contraction();
  // A zero at radius 0.5 + h/3 that no grid point hits exactly.
  const double r = 0.5 + 0.02 / 3.0;
  const auto w = fields::square(fields::shifted(fields::norm_sq(Point::Zero(2)), -r * r));
  auto v = check_zero_sets(w, inst.w_tilde, inst.xprime, inst.target, GridSampler(0.02));
  EXPECT_TRUE(v.failed());
}

TEST(DecreaseBound, Examples) {
  const GridSampler s(0.02);
  auto lin = testinst::linear_contraction();
  auto v = check_decrease_bound(lin.w, lin.w_tilde, lin.inclusion, lin.xprime, s);
  EXPECT_TRUE(v.passed());
  EXPECT_LE(std::abs(v.worst), 1e-12);
  auto rot = testinst::rotation_rectangle();
  EXPECT_TRUE(check_decrease_bound(rot.w, rot.w_tilde, rot.inclusion, rot.xprime, s).passed());
  auto ex = testinst::expanding();
  auto bad = check_decrease_bound(ex.w, ex.w_tilde, ex.inclusion, ex.xprime, s);
  ASSERT_TRUE(bad.failed());
  EXPECT_EQ(bad.violations + 1, bad.checked);  // every sample but the origin
}

TEST(DecreaseBound, TooManyKinks) {
  auto lin = testinst::linear_contraction();
  const auto kinky = ScalarField(
      "kinky", [](const Point& x) { return x.squaredNorm(); },
      [](const Point&) -> std::optional<Point> { return std::nullopt; });
  try {
    check_decrease_bound(kinky, lin.w_tilde, lin.inclusion, lin.xprime, GridSampler(0.05));
    FAIL();
  } catch (const CertError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooManyKinks);
  }
}

TEST(MonotoneDecrease, Examples) {
  auto lin = testinst::linear_contraction();
  const DecreaseTolerance slack = decrease_tolerance(
      lin.w, lin.w_tilde, lin.inclusion, lin.xprime, GridSampler(0.05));
  const Point x0 = Eigen::Vector2d(0.3, 0.2);
  const double horizon = 5.0, dt = 1e-3;
  auto traj = integrate(lin.inclusion, x0, horizon, dt, Selector::first());
  EXPECT_TRUE(verify_monotone_decrease(traj, lin.w, lin.w_tilde, slack).passed());
  // Gronwall closed form for W.
  EXPECT_LE(lin.w(traj.final_state()),
            lin.w(x0) * std::exp(-2.0 * horizon) + slack.per_step(dt) * 5000);

  auto rest = integrate(lin.inclusion, Point::Zero(2), 1.0, dt, Selector::first());
  EXPECT_TRUE(verify_monotone_decrease(rest, lin.w, lin.w_tilde, slack).passed());

  auto ex = testinst::expanding();
  auto up = integrate(ex.inclusion, x0, 0.1, dt, Selector::first());
  auto v = verify_monotone_decrease(up, ex.w, ex.w_tilde, slack);
  ASSERT_TRUE(v.failed());
  EXPECT_EQ(v.witnesses.front().trajectory->step, 1u);
}

TEST(Convergence, Examples) {
  auto lin = testinst::linear_contraction();
  const SetDistance dstar(lin.target, GridSampler(0.05));
  auto traj = integrate(lin.inclusion, Eigen::Vector2d(0.2, -0.2), 20.0, 1e-3,
                        Selector::first());
  EXPECT_TRUE(verify_convergence(traj, dstar, 1e-3).passed());
  auto rest = integrate(lin.inclusion, Point::Zero(2), 1.0, 1e-3, Selector::first());
  EXPECT_TRUE(verify_convergence(rest, dstar, 1e-3).passed());

  Eigen::Matrix2d rot;
  rot << 0, -1, 1, 0;
  auto spin = testinst::linear_field(testinst::square(), rot, "spin");
  auto circ = integrate(spin, Eigen::Vector2d(0.5, 0.0), 5.0, 1e-3, Selector::first());
  auto v = verify_convergence(circ, dstar, 1e-3);
  ASSERT_TRUE(v.failed());
  EXPECT_EQ(v.witnesses.front().check, "convergence.final");
}

TEST(Certify, LinearContraction) {
  const auto t0 = std::chrono::steady_clock::now();
  auto cert = certify(testinst::linear_contraction(), quick());
  EXPECT_TRUE(cert.overall_pass) << cert.conclusion;
  ASSERT_TRUE(cert.construction);
  EXPECT_NEAR(std::sqrt(cert.construction->level), 0.35355, 0.01);
  EXPECT_TRUE(cert.xprime_invariance.passed());
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 60.0);
}

TEST(Certify, RotationRectangle) {
  auto cert = certify(testinst::rotation_rectangle(), quick());
  EXPECT_TRUE(cert.hypotheses_pass());
  EXPECT_TRUE(cert.xprime_invariance.failed());
  EXPECT_TRUE(cert.forward_invariance.passed());
  EXPECT_TRUE(cert.overall_pass) << cert.conclusion;
}

TEST(Certify, Expanding) {
  auto cert = certify(testinst::expanding(), quick());
  EXPECT_FALSE(cert.overall_pass);
  EXPECT_TRUE(cert.decrease_bound.failed());
  EXPECT_EQ(cert.conclusion, "not certified");
}
