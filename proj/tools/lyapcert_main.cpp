#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lyapcert/report.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> grid;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::size_t> starts;
  std::optional<std::string> policy;
};

nlohmann::json overrides_from(const Flags& f, const std::string& mode) {
  nlohmann::json n = nlohmann::json::object();
  if (f.seed) n["seed"] = *f.seed;
  if (f.grid) n["h"] = *f.grid;
  if (f.dt) n["dt"] = *f.dt;
  if (f.horizon) n["horizon"] = *f.horizon;
  if (f.starts) n["n_starts"] = *f.starts;
  if (f.policy) n["policies"] = nlohmann::json::array({*f.policy});
  nlohmann::json o = {{"mode", mode}};
  if (!n.empty()) o["numerics"] = n;
  return o;
}

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "Run configuration (JSON)")->required();
  cmd->add_option("--out", f.out, "Output directory (default $LYAPCERT_OUT or ./lyapcert_out)");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--grid", f.grid, "Grid spacing h")->check(CLI::PositiveNumber);
  cmd->add_option("--dt", f.dt, "Integration step");
  cmd->add_option("--horizon", f.horizon, "Integration horizon T");
  cmd->add_option("--starts", f.starts, "Number of trajectory starts");
  cmd->add_option("--policy", f.policy, "Selector policy")
      ->check(CLI::IsMember({"first", "mixture", "random", "adversarial", "all"}));
}

std::string default_out() {
  const char* env = std::getenv("LYAPCERT_OUT");
  return env && *env ? env : "lyapcert_out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical Lyapunov certificates for differential inclusions"};
  app.require_subcommand(1);
  Flags flags;
  std::string certificate;
  for (const char* mode : {"certify", "transitive", "invariance", "simulate"}) {
    add_run_flags(app.add_subcommand(mode, std::string("Run in ") + mode + " mode"), flags);
  }
  auto* replay_cmd = app.add_subcommand("replay", "Re-check the witnesses of a certificate");
  replay_cmd->add_option("certificate", certificate, "certificate.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lyapcert::kExitUsage;
  }

  try {
    if (replay_cmd->parsed()) return lyapcert::replay(certificate, std::cout);
    const std::string mode = app.get_subcommands().front()->get_name();
    const auto cfg = lyapcert::load_config(flags.config, overrides_from(flags, mode));
    const std::string out = !flags.out.empty()        ? flags.out
                            : !cfg.output.empty() ? cfg.output
                                                      : default_out();
    const auto result = lyapcert::run(cfg, out);
    std::cout << result.summary << '\n' << "certificate: " << result.certificate.string() << '\n';
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "lyapcert: " << e.what() << '\n';
    return lyapcert::kExitUsage;
  }
}
