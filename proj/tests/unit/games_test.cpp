#include <random>

#include <gtest/gtest.h>

#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace lyapcert;

namespace {

const GridSampler kMesh(0.02);

}  // namespace

TEST(SelfDefeating, Examples) {
  const auto rps = PopulationGame::rps();
  const auto whole = Region::whole(rps.domain());
  auto v = check_self_defeating(rps, whole, kMesh);
  EXPECT_TRUE(v.passed());
  EXPECT_LE(std::abs(v.worst), 1e-12);

  const auto neg = PopulationGame::neg_identity(testinst::interior_equilibrium());
  auto n = check_self_defeating(neg, whole, kMesh);
  EXPECT_TRUE(n.passed());
  EXPECT_NEAR(n.worst, -1.0, 1e-12);  // -|z|^2 for unit tangent z

  auto c = check_self_defeating(PopulationGame::coordination(), whole, kMesh);
  ASSERT_TRUE(c.failed());
  EXPECT_NEAR(c.worst, 1.0, 1e-12);
  EXPECT_FALSE(c.witnesses.empty());
}

TEST(SelfDefeating, FiniteDifferenceJacobianMatches) {
  const auto rps = PopulationGame::rps();
  for (const auto& x : oracle::random_simplex_points(3, 100, 7)) {
    const Eigen::MatrixXd fd = finite_difference_jacobian(
        [&](const Point& y) { return rps.payoff(y); }, x);
    EXPECT_LE((fd - rps.jacobian(x)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Dynamics, SmithVanishesAtEquilibrium) {
  const auto game = PopulationGame::neg_identity(testinst::interior_equilibrium());
  const auto inc = make_inclusion(game, {DynamicSpec::Family::kSmith});
  const Point eq = testinst::interior_equilibrium();
  const auto v = inc.velocities_at(eq);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.front().norm(), 0.0);
}

TEST(Dynamics, BestResponseTieAtUniformRps) {
  const auto inc = make_inclusion(PopulationGame::rps(), {DynamicSpec::Family::kBestResponse});
  const Point u = Eigen::Vector3d::Constant(1.0 / 3.0);
  const auto v = inc.velocities_at(u);
  ASSERT_EQ(v.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    Point e = Point::Zero(3);
    e[i] = 1.0;
    EXPECT_LE((v[i] - (e - u)).norm(), 1e-15);
  }
}

TEST(Dynamics, ReplicatorFixesVertices) {
  const auto inc = make_inclusion(PopulationGame::rps(), {DynamicSpec::Family::kReplicator});
  for (int i = 0; i < 3; ++i) {
    Point e = Point::Zero(3);
    e[i] = 1.0;
    EXPECT_EQ(inc.velocities_at(e).front().norm(), 0.0);
  }
}

TEST(Dynamics, UnknownFamily) {
  try {
    family_from_string("logit");
    FAIL();
  } catch (const CertError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownFamily);
  }
}

TEST(Dynamics, TangencyAndBoundary) {
  const auto game = PopulationGame::rps();
  const auto whole = Region::whole(game.domain());
  for (const char* fam : {"best_response", "tempered_br", "smith", "bnn", "replicator"}) {
    const auto inc = make_inclusion(game, {family_from_string(fam)});
    for (const auto& x : whole.sample(GridSampler(0.05))) {
      for (const auto& v : inc.velocities_at(x)) {
        EXPECT_LE(std::abs(v.sum()), 1e-12) << fam;
        for (int i = 0; i < 3; ++i) {
          if (x[i] == 0.0) EXPECT_GE(v[i], -1e-15) << fam;
        }
        EXPECT_LE(v.norm(), inc.bound()) << fam;
      }
    }
  }
}

TEST(Dynamics, PositiveCorrelation) {
  const auto game = PopulationGame::neg_identity(testinst::interior_equilibrium());
  for (const char* fam : {"smith", "bnn", "replicator"}) {
    const auto inc = make_inclusion(game, {family_from_string(fam)});
    for (const auto& x : Region::whole(game.domain()).sample(GridSampler(0.05))) {
      for (const auto& v : inc.velocities_at(x)) {
        EXPECT_GE(v.dot(game.payoff(x)), -1e-9) << fam;
      }
    }
  }
}

TEST(Dynamics, NashStationarityAtOracleEquilibria) {
  const auto neg = PopulationGame::neg_identity(testinst::interior_equilibrium());
  const Point eq = oracle::locate_nash([&](const Point& x) { return neg.payoff(x); }, 3);
  EXPECT_LE((eq - testinst::interior_equilibrium()).norm(), 1e-9);
  for (const char* fam : {"smith", "bnn"}) {
    const auto inc = make_inclusion(neg, {family_from_string(fam)});
    EXPECT_LE(inc.velocities_at(eq).front().norm(), 1e-8) << fam;
  }
  const auto rps = PopulationGame::rps();
  const Point u = oracle::locate_nash([&](const Point& x) { return rps.payoff(x); }, 3);
  EXPECT_LE((u - Eigen::Vector3d::Constant(1.0 / 3.0)).norm(), 1e-6);
  const auto br = make_inclusion(rps, {DynamicSpec::Family::kSmith});
  EXPECT_LE(br.velocities_at(u).front().norm(), 1e-5);
}

TEST(Dynamics, SimplexConservation) {
  const auto game = PopulationGame::rps();
  const Point x0 = Eigen::Vector3d(0.7, 0.2, 0.1);
  for (const char* fam : {"best_response", "tempered_br", "smith", "bnn", "replicator"}) {
    const auto inc = make_inclusion(game, {family_from_string(fam)});
    for (const auto& sel : {Selector::first(), Selector::mixture(), Selector::random(3)}) {
      auto traj = integrate(inc, x0, 10.0, max_step(inc), sel);
      for (const auto& x : traj.states) {
        EXPECT_LE(std::abs(x.sum() - 1.0), 1e-9) << fam;
        EXPECT_GE(x.minCoeff(), -1e-9) << fam;
      }
    }
  }
}

TEST(Gains, Values) {
  const auto rps = PopulationGame::rps();
  const auto smith = gains_lyapunov_candidates(rps, {DynamicSpec::Family::kSmith});
  EXPECT_DOUBLE_EQ(smith.w(Eigen::Vector3d(1, 0, 0)), 0.5);
  EXPECT_EQ(smith.note, "candidate");

  const auto neg = PopulationGame::neg_identity(testinst::interior_equilibrium());
  const auto bnn = gains_lyapunov_candidates(neg, {DynamicSpec::Family::kBnn});
  EXPECT_EQ(bnn.w(testinst::interior_equilibrium()), 0.0);
  const auto s2 = gains_lyapunov_candidates(neg, {DynamicSpec::Family::kSmith});
  EXPECT_GT(s2.w(Eigen::Vector3d(0.4, 0.3, 0.3)), 0.0);
}

TEST(Gains, UnsupportedFamilies) {
  const auto rps = PopulationGame::rps();
  for (auto fam : {DynamicSpec::Family::kReplicator, DynamicSpec::Family::kTemperedBestResponse}) {
    try {
      gains_lyapunov_candidates(rps, {fam});
      FAIL();
    } catch (const CertError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kUnsupportedFamily);
    }
  }
}

TEST(Gains, GradientsMatchCentralDifferences) {
  const auto neg = PopulationGame::neg_identity(testinst::interior_equilibrium());
  const auto pts = oracle::random_simplex_points(3, 500, 11);
  for (auto fam : {DynamicSpec::Family::kSmith, DynamicSpec::Family::kBnn,
                   DynamicSpec::Family::kBestResponse}) {
    const auto w = gains_lyapunov_candidates(neg, {fam}).w;
    const auto report = check_gradient(w, pts);
    EXPECT_GE(report.agreement_fraction(), 0.99);
    EXPECT_LE(report.max_relative_error, 1e-6);
  }
}

TEST(Gains, BestResponseDecreaseOnStableGame) {
  const auto neg = PopulationGame::neg_identity(testinst::interior_equilibrium());
  const DynamicSpec spec{DynamicSpec::Family::kBestResponse};
  const auto cand = gains_lyapunov_candidates(neg, spec);
  const auto inc = make_inclusion(neg, spec);
  const auto whole = Region::whole(neg.domain());
  auto v = check_decrease_bound(cand.w, cand.w_tilde, inc, whole, GridSampler(0.013));
  EXPECT_TRUE(v.passed()) << v.reason;
}

TEST(Gains, SmithCertifiesOnStableGame) {
  CertifyOptions o;
  o.sampler = GridSampler(0.01);
  o.dt = 0.01;
  o.n_starts = 10;
  auto cert = certify(testinst::game_instance(DynamicSpec::Family::kSmith), o);
  EXPECT_TRUE(cert.overall_pass) << cert.conclusion << " "
                                 << cert.construction_verdict.reason << " "
                                 << cert.zero_sets.reason << " "
                                 << cert.convergence.reason;
}
