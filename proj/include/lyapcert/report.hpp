#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "lyapcert/config.hpp"

namespace lyapcert {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
  kExitPass = 0,
  kExitUsage = 1,
  kExitHypothesis = 2,
  kExitInvariance = 3,
};

nlohmann::json to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Certificate& cert);

/// Exit status of a certify/transitive run: 0 pass, 2 when a hypothesis,
/// transitivity condition or the construction fails, 3 when only the
/// trajectory suites report witnesses.
int exit_code(const Certificate& cert);

struct RunResult {
  int exit_code = kExitPass;
  std::filesystem::path certificate;
  std::string summary;
};

/// Runs the configured mode and writes certificate.json, witnesses.csv,
/// trajectories/*.csv and plotdata/*.csv under out_dir. Every file is
/// written to a temporary name and renamed into place.
RunResult run(const RunConfig& config, const std::filesystem::path& out_dir);

/// Re-checks every witness recorded in a certificate against the config it
/// names. Throws CertError(kSchemaMismatch) on a schema version or config
/// hash mismatch. Returns 0 iff every witness reproduces.
int replay(const std::filesystem::path& certificate, std::ostream& log);

/// Writes bytes to path via a temporary sibling and an atomic rename.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

/// Segments of {f = level} over a 2-D box, or over the (x1, x2) chart of the
/// 3-simplex. Each entry holds the two end points of one segment.
std::vector<std::pair<Point, Point>> level_set_segments(
    const ScalarField& f, double level, const CompactDomain& domain,
    double h);

}  // namespace lyapcert
