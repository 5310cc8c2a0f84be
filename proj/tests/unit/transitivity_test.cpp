#include <gtest/gtest.h>

#include "support/instances.hpp"

using namespace lyapcert;

namespace {

const Verdict& condition(const TransitivitySection& s, const std::string& name) {
  for (const auto& [n, v] : s.conditions) {
    if (n == name) return v;
  }
  throw std::out_of_range(name);
}

CertifyOptions quick() {
  CertifyOptions o;
  o.sampler = GridSampler(0.02);
  o.dt = 0.01;
  o.n_starts = 20;
  return o;
}

}  // namespace

TEST(Transitivity, NestedQuadraticConditionsHold) {
  const auto inst = testinst::nested_quadratic();
  const auto s = check_transitivity_conditions(inst, GridSampler(0.02));
  for (const auto& [name, v] : s.conditions) {
    EXPECT_TRUE(v.passed()) << name << ": " << v.reason;
  }
  EXPECT_TRUE(s.failed_conditions.empty());
  ASSERT_FALSE(s.rescued_points.empty());
  for (const auto& x : s.rescued_points) {
    EXPECT_GT(inst.w2_tilde(x), 0.0);
    EXPECT_LE(inst.w1_tilde(x) + inst.w2_tilde(x), 0.0);
    EXPECT_GE(x.norm(), 0.3);
  }
}

TEST(Transitivity, ConditionCViolated) {
  const auto s = check_transitivity_conditions(testinst::nested_c_violated(), GridSampler(0.02));
  const auto& c = condition(s, "c");
  ASSERT_TRUE(c.failed());
  EXPECT_NEAR(c.worst, 0.1, 0.01);
  EXPECT_NEAR(c.witnesses.front().point.norm(), 0.6, 0.1);
  EXPECT_TRUE(condition(s, "b-ii").passed());
  EXPECT_TRUE(condition(s, "b-iv").passed());
  ASSERT_EQ(s.failed_conditions.size(), 1u);
  EXPECT_EQ(s.failed_conditions.front(), "c");
}

TEST(Transitivity, ComposeValues) {
  const auto d = testinst::square();
  TransitivityInstance inst{"consts", Region::whole(d), Region::whole(d),
                            testinst::origin(d), fields::constant(0.3),
                            fields::constant(0.4), fields::constant(-1.0),
                            fields::constant(0.5), testinst::linear_contraction().inclusion};
  const auto [w, wt] = compose_transitive(inst);
  const Point x = Eigen::Vector2d(0.1, 0.2);
  EXPECT_DOUBLE_EQ(w(x), 1.0);
  EXPECT_DOUBLE_EQ(wt(x), -1.5);

  const auto nested = testinst::nested_quadratic();
  const auto [w2, wt2] = compose_transitive(nested);
  EXPECT_EQ(w2(Point::Zero(2)), 0.0);
  EXPECT_EQ(wt2(Point::Zero(2)), 0.0);
}

TEST(Transitivity, CompositeGradientUndefinedWherePartIsKinked) {
  auto inst = testinst::nested_quadratic();
  inst.w1 = fields::norm(Point::Zero(2), 1);
  const auto [w, wt] = compose_transitive(inst);
  EXPECT_FALSE(grad(w, Eigen::Vector2d(0.0, 0.5)).has_value());
  EXPECT_TRUE(grad(w, Eigen::Vector2d(0.2, 0.5)).has_value());
}

TEST(Transitivity, SignChainOnComposite) {
  const auto inst = testinst::nested_quadratic();
  const auto [w, wt] = compose_transitive(inst);
  for (const auto& x : inst.x1.sample(GridSampler(0.05))) {
    EXPECT_GE(w(x), 0.0);
    EXPECT_LE(wt(x), 1e-12);
    auto g = grad(w, x);
    if (!g) continue;
    for (const auto& v : inst.inclusion.velocities_at(x)) {
      EXPECT_LE(g->dot(v), wt(x) + 1e-9);
    }
    // Zero-set logic: W = 0 forces both parts to vanish.
    if (std::abs(w(x)) <= 1e-9) {
      EXPECT_LE(std::abs(inst.w1(x)), 1e-9);
      EXPECT_LE(std::abs(inst.w2(x)), 1e-9);
    }
  }
}

TEST(Transitivity, CertifyNested) {
  auto cert = certify_transitive(testinst::nested_quadratic(), quick());
  ASSERT_TRUE(cert.transitivity);
  EXPECT_TRUE(cert.transitivity->zero_set_identity.passed());
  EXPECT_TRUE(cert.overall_pass) << cert.conclusion;
  EXPECT_TRUE(cert.convergence.passed());
}

TEST(Transitivity, KappaRobustness) {
  for (double kappa : {1.5, 3.0, 5.0}) {
    auto cert = certify_transitive(testinst::nested_quadratic(), quick(), kappa);
    EXPECT_TRUE(cert.overall_pass) << kappa;
  }
}

TEST(Transitivity, CertifyWithFailedConditionFails) {
  auto cert = certify_transitive(testinst::nested_c_violated(), quick());
  EXPECT_FALSE(cert.overall_pass);
  ASSERT_TRUE(cert.transitivity);
  EXPECT_EQ(cert.transitivity->failed_conditions, std::vector<std::string>{"c"});
}

TEST(Transitivity, SpuriousZeroOfW2) {
  auto inst = testinst::nested_quadratic();
  // W2 = r^2 (r - 0.2)^2 vanishes on the circle r = 0.2 inside X2.
  inst.w2 = ScalarField("spurious", [](const Point& x) {
    const double r = x.norm();
    return r * r * (r - 0.2) * (r - 0.2);
  });
  inst.w2_tilde = ScalarField(
      "spurious~",
      [](const Point& x) {
        const double r = x.norm();
        return -2.0 * r * r * (r - 0.2) * (2.0 * r - 0.2);
      },
      {}, Smoothness::kLowerSemicontinuous);
  auto cert = certify_transitive(inst, quick());
  EXPECT_FALSE(cert.overall_pass);
  ASSERT_TRUE(cert.transitivity);
  EXPECT_TRUE(condition(*cert.transitivity, "b-iii").failed());
  EXPECT_TRUE(cert.transitivity->zero_set_identity.failed());
}
