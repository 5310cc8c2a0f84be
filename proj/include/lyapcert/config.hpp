#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyapcert/certifier.hpp"
#include "lyapcert/games.hpp"
#include "lyapcert/transitivity.hpp"

namespace lyapcert {

enum class Mode { kCertify, kTransitive, kInvariance, kSimulate };
std::string_view to_string(Mode mode);
Mode mode_from_string(std::string_view name);

struct Numerics {
  double h = 0.01;
  double dt = 1e-3;
  std::optional<double> horizon;
  double max_horizon = 1000.0;
  std::size_t n_starts = 100;
  std::uint64_t seed = 1;
  std::vector<Selector::Kind> policies = {
      Selector::Kind::kFirst, Selector::Kind::kMixture, Selector::Kind::kRandom,
      Selector::Kind::kAdversarial};
  double tol_conv = 1e-3;
  bool strict_level = false;
  double kappa = 2.0;
  bool check_xprime_invariance = true;
  double lipschitz_cap = 1e6;
  std::size_t keep_trajectories = 8;
  Tolerances tol;
};

/// A parsed run description. `document` is the effective JSON (file
/// contents with command-line overrides applied); everything else is
/// decoded from it.
struct RunConfig {
  nlohmann::json document;
  nlohmann::json overrides = nlohmann::json::object();
  std::filesystem::path path;

  Mode mode = Mode::kCertify;
  std::string id;
  std::optional<CompactDomain> domain;
  std::optional<PopulationGame> game;
  std::map<std::string, Region> regions;
  std::map<std::string, ScalarField> fields;
  std::optional<Inclusion> inclusion;
  Numerics numerics;
  std::vector<Point> simulate_starts;
  std::string output;

  /// Compact dump with sorted keys; parse(canonical()) reproduces it.
  std::string canonical() const;
  /// FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;

  const Region& region(const std::string& name) const;
  const ScalarField& field(const std::string& name) const;

  Instance instance() const;
  TransitivityInstance transitivity_instance() const;
  CertifyOptions certify_options() const;
  InvarianceOptions invariance_options() const;
};

/// Throws CertError(kInvalidConfig) with a "path: message" diagnostic (or a
/// line/column for JSON syntax errors).
RunConfig parse_config(const nlohmann::json& document,
                       const std::filesystem::path& path = {});
RunConfig load_config(const std::filesystem::path& path,
                      const nlohmann::json& overrides = nlohmann::json::object());
nlohmann::json parse_json_text(const std::string& text);

/// Applies {"numerics": {...}, "mode": ...} style overrides onto a document.
nlohmann::json apply_overrides(nlohmann::json document,
                               const nlohmann::json& overrides);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace lyapcert
