#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <lyapcert/report.hpp>

using namespace lyapcert;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = LYAPCERT_CONFIG_DIR;

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lyapcert_report_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunConfig quick(const std::string& name, const std::string& extra = "{}") {
    json o = json::parse(extra);
    o.merge_patch(json::parse(R"({"numerics": {"h": 0.02, "n_starts": 12, "dt": 0.01, "horizon": 20}})"));
    return load_config(kConfigs / name, o);
  }

  static json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Scratch, LinearContractionCertifies) {
  const auto result = run(quick("linear_contraction.json"), dir_ / "out");
  EXPECT_EQ(result.exit_code, 0);
  const auto cert = read_json(dir_ / "out" / "certificate.json");
  EXPECT_EQ(cert["schema_version"], 1);
  EXPECT_EQ(cert["overall"]["pass"], true);
  const double h = 0.02;
  EXPECT_NEAR(cert["construction"]["d_bar"].get<double>(), 1.0, std::sqrt(2.0) * h);
  EXPECT_NEAR(cert["construction"]["w_bar"].get<double>(), 0.25, 2 * h);
  for (const char* f : {"witnesses.csv", "plotdata/level_sets.csv", "plotdata/regions.csv",
                        "plotdata/trajectories.csv", "trajectories/traj_000_first.csv"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "out")) {
    EXPECT_NE(e.path().extension(), ".tmp") << e.path();
  }
  std::ostringstream log;
  EXPECT_EQ(replay(result.certificate, log), 0) << log.str();
}

TEST_F(Scratch, RotationInvarianceReportsEscapes) {
  const auto result = run(quick("rotation_rectangle.json"), dir_ / "out");
  EXPECT_EQ(result.exit_code, kExitInvariance);
  const auto rows = slurp(dir_ / "out" / "witnesses.csv");
  EXPECT_NE(rows.find("forward_invariance,escape,"), std::string::npos);
  std::ostringstream log;
  EXPECT_EQ(replay(result.certificate, log), 0) << log.str();
  EXPECT_NE(log.str().find("witnesses reproduced"), std::string::npos);
}

TEST_F(Scratch, DefectsReplay) {
  for (const char* name : {"defect_sign_flip.json", "defect_spurious_zero.json",
                           "defect_zero_rate.json", "defect_transitivity_c.json"}) {
    const auto out = dir_ / name;
    const auto result = run(quick(name), out);
    EXPECT_EQ(result.exit_code, kExitHypothesis) << name;
    const auto cert = read_json(result.certificate);
    EXPECT_EQ(cert["overall"]["pass"], false);
    std::ostringstream log;
    EXPECT_EQ(replay(result.certificate, log), 0) << name << "\n" << log.str();
  }
}

TEST_F(Scratch, DeterministicApartFromTimestamp) {
  const auto cfg = quick("nested_transitive.json");
  run(cfg, dir_ / "a");
  run(cfg, dir_ / "b");
  auto a = read_json(dir_ / "a" / "certificate.json");
  auto b = read_json(dir_ / "b" / "certificate.json");
  a.erase("timestamp");
  b.erase("timestamp");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(slurp(dir_ / "a" / "witnesses.csv"), slurp(dir_ / "b" / "witnesses.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "plotdata" / "trajectories.csv"),
            slurp(dir_ / "b" / "plotdata" / "trajectories.csv"));
}

TEST_F(Scratch, ReplayDetectsConfigEdits) {
  const fs::path cfg_path = dir_ / "linear.json";
  fs::copy_file(kConfigs / "linear_contraction.json", cfg_path);
  const auto result = run(load_config(cfg_path, json::parse(R"({"numerics": {"h": 0.05, "n_starts": 4}})")),
                          dir_ / "out");
  std::ostringstream log;
  EXPECT_EQ(replay(result.certificate, log), 0);
  auto doc = read_json(cfg_path);
  doc["fields"]["W"] = {{"op", "norm_sq"}, {"center", {0.0, 0.1}}};
  std::ofstream(cfg_path) << doc.dump(2);
  try {
    replay(result.certificate, log);
    FAIL();
  } catch (const CertError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchemaMismatch);
  }
  auto cert = read_json(result.certificate);
  cert["schema_version"] = 7;
  std::ofstream(dir_ / "old.json") << cert.dump();
  EXPECT_THROW(replay(dir_ / "old.json", log), CertError);
}

TEST_F(Scratch, SimulateWritesTrajectories) {
  const auto result = run(quick("rotation_rectangle.json", R"({"mode": "simulate"})"), dir_ / "sim");
  EXPECT_EQ(result.exit_code, 0);
  const auto cert = read_json(result.certificate);
  EXPECT_EQ(cert["simulation"].size(), 8u);
  EXPECT_TRUE(fs::exists(dir_ / "sim" / "trajectories" / "traj_007_adversarial.csv"));
}

TEST(Report, VerdictJsonRoundTrip) {
  Verdict v = Verdict::fail("two escapes");
  v.checked = 10;
  v.violations = 2;
  v.worst = 0.5;
  Witness w;
  w.check = "escape";
  w.point = Eigen::Vector2d(0.1, 0.2);
  w.values = {{"t", 0.25}, {"gap", std::numeric_limits<double>::infinity()}};
  w.trajectory = TrajectoryRef{Eigen::Vector2d(0.3, 0.0), "random", 42, 25, 0.25};
  v.witnesses.push_back(w);
  const json j = to_json(v);
  EXPECT_TRUE(j["witnesses"][0]["values"]["gap"].is_null());
  const Verdict back = verdict_from_json(j);
  EXPECT_EQ(to_json(back).dump(), j.dump());
  EXPECT_EQ(back.witnesses[0].trajectory->seed, 42u);
}

TEST(Report, LevelSetsOfTheSquaredNorm) {
  const auto d = CompactDomain::box(Eigen::Vector2d(-1, -1), Eigen::Vector2d(1, 1));
  const auto segs = level_set_segments(fields::norm_sq(Point::Zero(2)), 0.25, d, 0.02);
  ASSERT_GT(segs.size(), 100u);
  for (const auto& [p, q] : segs) {
    ASSERT_NEAR(p.norm(), 0.5, 1e-3);
    ASSERT_NEAR(q.norm(), 0.5, 1e-3);
  }
  const auto simplex = CompactDomain::simplex(3);
  const Point c = Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3);
  const auto ssegs = level_set_segments(fields::norm_sq(c), 0.01, simplex, 0.01);
  ASSERT_FALSE(ssegs.empty());
  for (const auto& [p, q] : ssegs) {
    ASSERT_NEAR(p.sum(), 1.0, 1e-12);
    ASSERT_NEAR((p - c).squaredNorm(), 0.01, 1e-3);
  }
}

TEST(Report, AtomicWriteReplacesWholeFile) {
  const fs::path p = fs::temp_directory_path() / "lyapcert_atomic" / "x.txt";
  write_atomic(p, "first version, long");
  write_atomic(p, "second");
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "second");
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
  fs::remove_all(p.parent_path());
}

TEST(Cli, UsageErrorsExitOne) {
  const std::string cli = LYAPCERT_CLI;
  const fs::path out = fs::temp_directory_path() / "lyapcert_cli_out";
  const std::string cfg = (kConfigs / "linear_contraction.json").string();
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status(cli + " certify --config " + cfg + " --dt -1 --out " + out.string()), 1);
  EXPECT_EQ(status(cli + " certify --config /nonexistent.json"), 1);
  EXPECT_EQ(status(cli), 1);
  EXPECT_EQ(status(cli + " certify --config " + cfg + " --policy sideways"), 1);
  EXPECT_FALSE(fs::exists(out / "certificate.json"));
  EXPECT_EQ(status(cli + " invariance --config " + (kConfigs / "rotation_rectangle.json").string() +
                   " --grid 0.05 --starts 8 --dt 0.01 --out " + out.string()),
            3);
  EXPECT_EQ(status(cli + " replay " + (out / "certificate.json").string()), 0);
  fs::remove_all(out);
}
