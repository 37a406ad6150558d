// tulip-sim: attack scenarios against a simulated or live deployment.
//
//   tulip-sim run --config scenario.json [--out report.json]
//   tulip-sim estimate --config scenario.json --seeds 100
//   tulip-sim playbook [--url http://host:8080 --username u --password pw ...]

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tulip/harness.h"

namespace {

tulip::ScenarioConfig read_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw tulip::HarnessError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return tulip::ScenarioConfig::from_json(buf.str());
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(out_path);
  out << text << "\n";
  if (!out) throw tulip::HarnessError("cannot write " + out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TULIP threat harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string mode;
  std::uint64_t seed = 0;
  bool seed_set = false;

  auto* run = app.add_subcommand("run", "Run one scenario and print its report");
  run->add_option("--config", config_path, "Scenario config (JSON)");
  run->add_option("--out", out_path, "Write the report here instead of stdout");
  run->add_option("--mode", mode, "Override the mode")->check(CLI::IsMember({"tulip", "baseline"}));
  run->add_option("--seed", seed)->each([&](const std::string&) { seed_set = true; });

  std::uint64_t seeds = 100;
  auto* estimate = app.add_subcommand("estimate", "Breach frequency over many seeds");
  estimate->add_option("--config", config_path, "Scenario config (JSON)");
  estimate->add_option("--seeds", seeds)->check(CLI::PositiveNumber);
  estimate->add_option("--mode", mode)->check(CLI::IsMember({"tulip", "baseline"}));

  tulip::RemoteTarget::Options remote;
  std::string valid_cookie;
  std::string revoked_cookie;
  auto* playbook = app.add_subcommand("playbook", "Run attacker variants (a)-(e)");
  playbook->add_option("--target,--url", remote.url, "Attack a live service instead of a simulated one");
  playbook->add_option("--username", remote.username);
  playbook->add_option("--password", remote.password);
  playbook->add_option("--admin-token", remote.admin_token)->envname("TULIP_ADMIN_TOKEN");
  playbook->add_option("--cookie", valid_cookie, "A valid token for the victim");
  playbook->add_option("--revoked-cookie", revoked_cookie, "A token revoked by a version bump");
  playbook->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || estimate->parsed()) {
      tulip::ScenarioConfig config = read_config(config_path);
      if (mode == "tulip") config.mode = tulip::ScenarioMode::kTulip;
      if (mode == "baseline") config.mode = tulip::ScenarioMode::kBaseline;
      if (seed_set) config.seed = seed;
      for (const auto& w : config.warnings()) std::cerr << "tulip-sim: warning: " << w << "\n";

      if (estimate->parsed()) {
        const tulip::BreachFrequency f = tulip::estimate_breach_frequency(config, seeds);
        std::cout << "runs " << f.runs << ", runs with a breach " << f.runs_with_breach
                  << "\nempirical " << f.empirical << "\nanalytic  " << f.analytic << "\n";
        return 0;
      }
      const tulip::ScenarioReport report = tulip::run_scenario(config);
      emit(report.to_json(), out_path);
      if (!report.tulip_invariants_hold()) {
        std::cerr << "tulip-sim: invariant violated in tulip mode\n";
        return 1;
      }
      return 0;
    }

    tulip::PlaybookReport report;
    if (remote.url.empty()) {
      // Careless victim: approves every push, so only the gate stands in the way.
      tulip::SimulatedDeployment deployment(tulip::ScenarioMode::kTulip, tulip::TransportKind::kDirect, 1, 1.0);
      tulip::DeploymentTarget target(deployment);
      report = tulip::run_attacker_playbook(target);
    } else {
      if (!valid_cookie.empty()) remote.valid_cookie = valid_cookie;
      if (!revoked_cookie.empty()) remote.revoked_cookie = revoked_cookie;
      tulip::RemoteTarget target(remote);
      report = tulip::run_attacker_playbook(target);
    }
    emit(report.to_json(), out_path);
    return report.as_expected() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "tulip-sim: " << e.what() << "\n";
    return 2;
  }
}
