#include <gtest/gtest.h>

#include "tulip/harness.h"

namespace tulip {
namespace {

ScenarioConfig small(ScenarioMode mode, std::uint64_t seed = 1) {
  ScenarioConfig c;
  c.k = 30;
  c.n = 5;
  c.attacker_attempts_per_user = 20;
  c.seed = seed;
  c.mode = mode;
  c.mfa_accept_probability = 0.05;
  return c;
}

TEST(Scenario, TulipModeHasNoBreachesOrPrompts) {
  ScenarioConfig c;  // k=100, n=10, 50 attempts
  const auto r = run_scenario(c);
  EXPECT_EQ(r.breaches, 0u);
  EXPECT_EQ(r.mfa_prompts_triggered, 0u);
  EXPECT_EQ(r.attacker_credential_checks, 0u);
  EXPECT_EQ(r.gate_rejections, (std::map<std::string, std::uint64_t>{{"no_token", 500}}));
  EXPECT_EQ(r.honest_enrolled, 100u);
  EXPECT_EQ(r.honest_logins, 100u);
  EXPECT_TRUE(r.tulip_invariants_hold());
}

TEST(Scenario, BaselineModeBreaches) {
  ScenarioConfig c;
  c.mode = ScenarioMode::kBaseline;
  const auto r = run_scenario(c);
  EXPECT_GT(r.breaches, 0u);
  EXPECT_GT(r.mfa_prompts_triggered, 0u);
  EXPECT_EQ(r.attacker_credential_checks, r.mfa_prompts_triggered);
  std::uint64_t attempts = 0;
  for (const auto& u : r.users) {
    if (!u.compromised) EXPECT_EQ(u.attacker_attempts, 0u);
    if (u.breached) EXPECT_TRUE(u.compromised);
    attempts += u.attacker_attempts;
  }
  EXPECT_EQ(attempts, r.attacker_credential_checks);
}

TEST(Scenario, NoCompromisedUsersMeansNoBreaches) {
  for (auto mode : {ScenarioMode::kTulip, ScenarioMode::kBaseline}) {
    auto c = small(mode);
    c.n = 0;
    c.mfa_accept_probability = 1.0;
    const auto r = run_scenario(c);
    EXPECT_EQ(r.breaches, 0u);
    EXPECT_EQ(r.mfa_prompts_triggered, 0u);
  }
}

TEST(Scenario, DeterministicPerSeed) {
  for (auto mode : {ScenarioMode::kTulip, ScenarioMode::kBaseline}) {
    auto c = small(mode, 42);
    c.mfa_accept_probability = 0.1;
    EXPECT_EQ(run_scenario(c), run_scenario(c));
    c.concurrency = 1;
    const auto serial = run_scenario(c);
    c.concurrency = 8;
    EXPECT_EQ(serial, run_scenario(c));
  }
}

TEST(Scenario, HttpTransportMatchesDirect) {
  for (auto mode : {ScenarioMode::kTulip, ScenarioMode::kBaseline}) {
    auto c = small(mode, 9);
    c.mfa_accept_probability = 0.1;
    const auto direct = run_scenario(c);
    c.transport = TransportKind::kHttp;
    EXPECT_EQ(run_scenario(c), direct);
  }
}

TEST(Scenario, ModeMismatchIsAnError) {
  SimulatedDeployment d(ScenarioMode::kTulip, TransportKind::kDirect, 1, 0.0);
  EXPECT_THROW(run_scenario(small(ScenarioMode::kBaseline), d), HarnessError);
}

TEST(ScenarioConfig, ValidationAndWarnings) {
  ScenarioConfig c;
  c.n = c.k + 1;
  EXPECT_THROW(c.validate(), HarnessError);
  c.n = 60;
  c.k = 100;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.warnings().size(), 1u);
  c.n = 50;
  EXPECT_TRUE(c.warnings().empty());
  c.mfa_accept_probability = 1.5;
  EXPECT_THROW(c.validate(), HarnessError);
}

TEST(ScenarioConfig, JsonRoundTripAndStrictness) {
  auto c = small(ScenarioMode::kBaseline, 77);
  c.transport = TransportKind::kHttp;
  const auto back = ScenarioConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_THROW(ScenarioConfig::from_json(R"({"k": 10, "bogus": 1})"), HarnessError);
  EXPECT_THROW(ScenarioConfig::from_json(R"({"k": -1})"), HarnessError);
  EXPECT_THROW(ScenarioConfig::from_json(R"({"mode": "chaos"})"), HarnessError);
  EXPECT_THROW(ScenarioConfig::from_json(R"({"k": 5, "n": 6})"), HarnessError);
  EXPECT_THROW(ScenarioConfig::from_json("[]"), HarnessError);
}

TEST(Analytic, BreachProbability) {
  EXPECT_DOUBLE_EQ(analytic_breach_probability(0.0, 10, 50), 0.0);
  EXPECT_DOUBLE_EQ(analytic_breach_probability(1.0, 1, 1), 1.0);
  EXPECT_DOUBLE_EQ(analytic_breach_probability(0.5, 1, 2), 0.75);
  EXPECT_NEAR(analytic_breach_probability(0.05, 10, 50), 1.0 - std::pow(0.95, 500), 1e-15);
  EXPECT_DOUBLE_EQ(analytic_breach_probability(0.3, 0, 50), 0.0);
}

TEST(SimulatedMfa, SolicitedPromptsAreApprovedAndNotCounted) {
  SimulatedMfa mfa(1, 0.0);
  mfa.expect_login("alice");
  EXPECT_TRUE(mfa.approve("alice"));
  mfa.clear_expectation("alice");
  EXPECT_FALSE(mfa.approve("alice"));
  EXPECT_EQ(mfa.unsolicited_prompts(), 1u);
  EXPECT_EQ(mfa.unsolicited_prompts("alice"), 1u);
  EXPECT_EQ(mfa.unsolicited_prompts("bob"), 0u);
}

TEST(SimulatedMfa, AcceptRateTracksProbability) {
  SimulatedMfa mfa(5, 0.25);
  int accepted = 0;
  for (int i = 0; i < 20000; ++i) accepted += mfa.approve("user" + std::to_string(i % 50)) ? 1 : 0;
  EXPECT_NEAR(accepted / 20000.0, 0.25, 0.02);
  EXPECT_EQ(mfa.accepted_unsolicited(), static_cast<std::uint64_t>(accepted));
}

TEST(Playbook, OnlyStolenCookieReachesTheForm) {
  SimulatedDeployment d(ScenarioMode::kTulip, TransportKind::kDirect, 3, 1.0);
  DeploymentTarget target(d);
  const auto report = run_attacker_playbook(target);
  ASSERT_EQ(report.outcomes.size(), 5u);
  EXPECT_TRUE(report.as_expected()) << report.to_json();
  for (const auto& o : report.outcomes) {
    EXPECT_FALSE(o.skipped);
    if (o.variant == AttackVariant::kStolenCookie) {
      EXPECT_TRUE(o.login_form_served);
      EXPECT_TRUE(o.session_granted);
    } else {
      EXPECT_FALSE(o.login_form_served) << to_string(o.variant);
      EXPECT_FALSE(o.session_granted) << to_string(o.variant);
      EXPECT_EQ(o.status, 401);
      EXPECT_EQ(o.credential_checks, 0u);
      EXPECT_EQ(o.mfa_prompts, 0u);
    }
  }
  EXPECT_EQ(report.outcomes[1].reason, "no_token");
  EXPECT_EQ(report.outcomes[2].reason, "version_mismatch");
  EXPECT_EQ(report.outcomes[3].reason, "bad_signature");
}

TEST(Playbook, RemoteTargetOverHttp) {
  SimulatedDeployment d(ScenarioMode::kTulip, TransportKind::kHttp, 3, 1.0);
  DeploymentTarget local(d);
  RemoteTarget::Options o;
  o.url = d.base_url();
  o.username = local.username();
  o.password = local.password();
  o.admin_token = d.service().options().admin_secret;
  o.revoked_cookie = local.revoked_cookie();
  o.valid_cookie = local.victim_cookie();
  RemoteTarget remote(o);
  ASSERT_TRUE(remote.stats());
  const auto report = run_attacker_playbook(remote);
  EXPECT_TRUE(report.as_expected()) << report.to_json();
  for (const auto& o2 : report.outcomes) {
    EXPECT_FALSE(o2.skipped);
    if (o2.variant != AttackVariant::kStolenCookie) EXPECT_EQ(o2.credential_checks, 0u);
  }
  EXPECT_TRUE(report.outcomes.back().session_granted);
}

TEST(Playbook, RemoteTargetWithoutCookiesSkipsThoseVariants) {
  SimulatedDeployment d(ScenarioMode::kTulip, TransportKind::kHttp, 3, 1.0);
  RemoteTarget remote({d.base_url(), "victim", "pw", "", std::nullopt, std::nullopt});
  EXPECT_FALSE(remote.stats());
  const auto report = run_attacker_playbook(remote);
  EXPECT_TRUE(report.outcomes[2].skipped);
  EXPECT_TRUE(report.outcomes[4].skipped);
  EXPECT_TRUE(report.as_expected());
}

}  // namespace
}  // namespace tulip
