#include <gtest/gtest.h>

#include <random>

#include "fixtures.h"
#include "oracles.h"
#include "tulip/enrollment.h"
#include "tulip/error.h"
#include "tulip/token.h"

namespace tulip {
namespace {

constexpr UnixTime kNow = 1'700'000'000;

std::vector<std::string> labels(const std::vector<EnrollState>& trace) {
  std::vector<std::string> out;
  for (auto s : trace) out.emplace_back(label(s));
  return out;
}

using Trace = std::vector<std::string>;

class EnrollTest : public ::testing::Test {
 protected:
  EnrollTest() { store_.add_user(testing::user("alice", 3)); }

  EnrollmentRequest request(std::string password = "alice-password") const {
    EnrollmentRequest r;
    r.username = "alice";
    r.password = std::move(password);
    r.client_address = "10.0.0.5";
    r.challenge_responses["otp"] = oracle::totp("12345678901234567890", kNow);
    return r;
  }

  EnrollmentOutcome run(const EnrollmentRequest& r, UnixTime now = kNow) {
    return enroll(r, store_, ring_, policy_, now);
  }

  std::uint64_t count() { return store_.find_by_username("alice")->sso_jwt_count; }

  MemoryDirectory store_{PasswordHashParams::fast_for_testing()};
  SigningKeyring ring_ = testing::test_keyring();
  ChallengePolicy policy_ = ChallengePolicy::from_json(R"([
    {"id": "net", "kind": "network_allowlist", "cidrs": ["10.0.0.0/8"]},
    {"id": "group", "kind": "group_membership"},
    {"id": "otp", "kind": "totp"}
  ])");
};

TEST_F(EnrollTest, NoTokenValidCredentialsMintsToken) {
  const auto out = run(request());
  ASSERT_TRUE(out.accepted);
  EXPECT_FALSE(out.reused);
  EXPECT_EQ(labels(out.trace), (Trace{"q_r", "q_epsilon", "q_c", "q_alpha"}));
  EXPECT_EQ(count(), 2u);
  const auto v = verify_token(out.token, kNow, ring_);
  ASSERT_TRUE(v.ok());
  EXPECT_EQ(v.claims().ouid, store_.find_by_username("alice")->sso_jwt_ouid);
  EXPECT_EQ(v.claims().version, 0u);
}

TEST_F(EnrollTest, WrongPasswordDeclines) {
  const auto out = run(request("nope"));
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(out.reason, DeclineReason::kBadCredentials);
  EXPECT_EQ(labels(out.trace), (Trace{"q_r", "q_epsilon", "q_delta"}));
  EXPECT_EQ(count(), 3u);
}

TEST_F(EnrollTest, ValidTokenIsReusedWithoutMutation) {
  const auto first = run(request());
  auto r = request();
  r.presented_token = first.token;
  const auto out = run(r);
  ASSERT_TRUE(out.accepted);
  EXPECT_TRUE(out.reused);
  EXPECT_TRUE(out.token.empty());
  EXPECT_EQ(labels(out.trace), (Trace{"q_r", "q_tau", "q_alpha"}));
  EXPECT_EQ(count(), 2u);
}

TEST_F(EnrollTest, ValidTokenReusedEvenWithoutCredentials) {
  const auto first = run(request());
  EnrollmentRequest r;
  r.presented_token = first.token;
  EXPECT_TRUE(run(r).reused);
}

TEST_F(EnrollTest, RevokedTokenFallsThroughToReenrollment) {
  const auto first = run(request());
  store_.bump_version("alice");
  auto r = request();
  r.presented_token = first.token;
  const auto out = run(r);
  ASSERT_TRUE(out.accepted);
  EXPECT_FALSE(out.reused);
  EXPECT_EQ(labels(out.trace), (Trace{"q_r", "q_tau", "q_epsilon", "q_c", "q_alpha"}));
  EXPECT_EQ(verify_token(out.token, kNow, ring_).claims().version, 1u);
}

TEST_F(EnrollTest, InvalidTokenWithBadCredentialsDeclines) {
  auto r = request("nope");
  r.presented_token = "garbage";
  const auto out = run(r);
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(labels(out.trace), (Trace{"q_r", "q_tau", "q_epsilon", "q_delta"}));
}

TEST_F(EnrollTest, ExhaustedQuotaDeclines) {
  store_.set_count("alice", 0);
  const auto out = run(request());
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(out.reason, DeclineReason::kQuotaExhausted);
  EXPECT_EQ(labels(out.trace), (Trace{"q_r", "q_epsilon", "q_c", "q_delta"}));
  EXPECT_EQ(count(), 0u);
}

TEST_F(EnrollTest, FailedChallengeDeclinesWithoutConsuming) {
  auto r = request();
  r.client_address = "192.168.1.1";
  auto out = run(r);
  EXPECT_EQ(out.reason, DeclineReason::kChallengeFailed);
  EXPECT_EQ(labels(out.trace), (Trace{"q_r", "q_epsilon", "q_delta"}));

  r = request();
  r.challenge_responses["otp"] = oracle::totp("12345678901234567890", kNow + 120);
  EXPECT_EQ(run(r).reason, DeclineReason::kChallengeFailed);

  r = request();
  r.challenge_responses.erase("otp");
  EXPECT_EQ(run(r).reason, DeclineReason::kChallengeFailed);

  r = request();
  r.challenge_responses["surprise"] = "1";
  EXPECT_EQ(run(r).reason, DeclineReason::kChallengeFailed);
  EXPECT_EQ(count(), 3u);
}

TEST_F(EnrollTest, UnknownUserDeclinesLikeWrongPassword) {
  auto r = request();
  r.username = "mallory";
  const auto out = run(r);
  EXPECT_EQ(out.reason, DeclineReason::kBadCredentials);
  EXPECT_EQ(labels(out.trace), (Trace{"q_r", "q_epsilon", "q_delta"}));
}

TEST_F(EnrollTest, GroupMembershipRequired) {
  auto outsider = testing::user("bob");
  outsider.enrollment_group_member = false;
  store_.add_user(outsider);
  auto r = request();
  r.username = "bob";
  r.password = "bob-password";
  EXPECT_EQ(run(r).reason, DeclineReason::kChallengeFailed);
}

// Hands back a consumed record with no ouid so that minting fails.
class BrokenMintDirectory final : public UserDirectory {
 public:
  explicit BrokenMintDirectory(MemoryDirectory& inner) : inner_(inner) {}
  std::optional<UserRecord> find_by_username(std::string_view u) override { return inner_.find_by_username(u); }
  std::optional<UserRecord> find_by_ouid(std::string_view o) override { return inner_.find_by_ouid(o); }
  bool verify_credentials(std::string_view u, std::string_view p) override { return inner_.verify_credentials(u, p); }
  ConsumeResult try_consume_enrollment(std::string_view u) override {
    auto r = inner_.try_consume_enrollment(u);
    r.record.sso_jwt_ouid.clear();
    return r;
  }
  void refund_enrollment(std::string_view u) override {
    ++refunds;
    inner_.refund_enrollment(u);
  }
  std::optional<std::uint64_t> read_version(std::string_view o) override { return inner_.read_version(o); }
  UserRecord add_user(const NewUser& u) override { return inner_.add_user(u); }
  Change<std::uint64_t> bump_version(std::string_view u) override { return inner_.bump_version(u); }
  std::size_t global_bump() override { return inner_.global_bump(); }
  Change<std::uint64_t> set_count(std::string_view u, std::int64_t v) override { return inner_.set_count(u, v); }
  Change<std::uint64_t> increment_count(std::string_view u) override { return inner_.increment_count(u); }
  Change<std::string> rotate_ouid(std::string_view u) override { return inner_.rotate_ouid(u); }
  StoreSnapshot snapshot() override { return inner_.snapshot(); }
  int refunds = 0;

 private:
  MemoryDirectory& inner_;
};

TEST_F(EnrollTest, MintFailureRefundsQuota) {
  BrokenMintDirectory broken(store_);
  const auto out = enroll(request(), broken, ring_, policy_, kNow);
  EXPECT_FALSE(out.accepted);
  EXPECT_EQ(out.reason, DeclineReason::kInternalError);
  EXPECT_EQ(broken.refunds, 1);
  EXPECT_EQ(count(), 3u);
}

TEST(EvaluateChallenge, EachKind) {
  UserRecord user;
  user.totp_secret = testing::kTotpSecret;
  user.enrollment_group_member = true;
  user.attributes["employee_id"] = "E-1234";
  const auto policy = ChallengePolicy::from_json(R"([
    {"id": "net", "kind": "network_allowlist", "cidrs": ["10.0.0.0/8"]},
    {"id": "group", "kind": "group_membership"},
    {"id": "emp", "kind": "static_attribute", "attribute": "employee_id"},
    {"id": "otp", "kind": "totp"}
  ])");
  EnrollmentRequest r;
  r.client_address = "10.1.2.3";
  r.challenge_responses = {{"emp", "E-1234"}, {"otp", oracle::totp("12345678901234567890", kNow)}};
  for (const auto& c : policy.challenges) EXPECT_TRUE(evaluate_challenge(c, r, user, kNow)) << c.id;

  EnrollmentRequest bad = r;
  bad.client_address = "192.168.1.1";
  EXPECT_FALSE(evaluate_challenge(policy.challenges[0], bad, user, kNow));
  UserRecord outsider = user;
  outsider.enrollment_group_member = false;
  EXPECT_FALSE(evaluate_challenge(policy.challenges[1], r, outsider, kNow));
  bad = r;
  bad.challenge_responses["emp"] = "E-1235";
  EXPECT_FALSE(evaluate_challenge(policy.challenges[2], bad, user, kNow));
  bad.challenge_responses.erase("emp");
  EXPECT_FALSE(evaluate_challenge(policy.challenges[2], bad, user, kNow));
  EXPECT_FALSE(evaluate_challenge(policy.challenges[3], r, user, kNow + 120));
  UserRecord no_secret = user;
  no_secret.totp_secret.clear();
  EXPECT_FALSE(evaluate_challenge(policy.challenges[3], r, no_secret, kNow));
}

TEST(ChallengePolicy, StrictParsing) {
  EXPECT_THROW(ChallengePolicy::from_json("{}"), ConfigError);
  EXPECT_THROW(ChallengePolicy::from_json(R"([{"id": "x", "kind": "magic"}])"), ConfigError);
  EXPECT_THROW(ChallengePolicy::from_json(R"([{"id": "x", "kind": "totp", "extra": 1}])"), ConfigError);
  EXPECT_THROW(ChallengePolicy::from_json(R"([{"id": "x", "kind": "network_allowlist"}])"), ConfigError);
  EXPECT_THROW(ChallengePolicy::from_json(R"([{"id": "password", "kind": "totp"}])"), ConfigError);
  EXPECT_THROW(ChallengePolicy::from_json(R"([{"id": "a", "kind": "totp"}, {"id": "a", "kind": "totp"}])"),
               ConfigError);
  const auto p = ChallengePolicy::from_json(
      R"([{"id": "n", "kind": "network_allowlist", "cidrs": ["10.0.0.0/8"]}, {"id": "o", "kind": "totp"}])");
  EXPECT_EQ(p.response_fields(), std::vector<std::string>{"o"});
  EXPECT_EQ(ChallengePolicy::from_json(p.to_json()).to_json(), p.to_json());
}

// Adding a challenge never turns a decline into an accept.
TEST(EnrollProperty, PolicyExtensionIsMonotone) {
  const std::vector<std::string> pool = {
      R"({"id": "net", "kind": "network_allowlist", "cidrs": ["10.0.0.0/8"]})",
      R"({"id": "group", "kind": "group_membership"})",
      R"({"id": "emp", "kind": "static_attribute", "attribute": "employee_id"})",
      R"({"id": "otp", "kind": "totp"})"};
  std::mt19937 rng(21);
  const auto ring = testing::test_keyring();
  for (int trial = 0; trial < 200; ++trial) {
    auto store = testing::fast_store();
    auto u = testing::user("u", 100);
    u.enrollment_group_member = rng() % 2;
    u.attributes["employee_id"] = "E1";
    store.add_user(u);
    EnrollmentRequest r;
    r.username = "u";
    r.password = rng() % 4 ? "u-password" : "bad";
    r.client_address = rng() % 2 ? "10.0.0.1" : "8.8.8.8";
    if (rng() % 2) r.challenge_responses["emp"] = rng() % 2 ? "E1" : "E2";
    if (rng() % 2) r.challenge_responses["otp"] = oracle::totp("12345678901234567890", kNow + (rng() % 2) * 300);

    std::string base = "[";
    std::string extended = "[";
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const bool in_base = rng() % 2;
      if (in_base) base += (base.size() > 1 ? "," : "") + pool[i];
      if (in_base || i == trial % pool.size()) extended += (extended.size() > 1 ? "," : "") + pool[i];
    }
    base += "]";
    extended += "]";
    auto base_policy = ChallengePolicy::from_json(base);
    auto ext_policy = ChallengePolicy::from_json(extended);
    // Responses for fields the policy does not know would decline both.
    EnrollmentRequest rb = r;
    std::erase_if(rb.challenge_responses, [&](const auto& kv) {
      const auto f = base_policy.response_fields();
      return std::find(f.begin(), f.end(), kv.first) == f.end();
    });
    EnrollmentRequest re = r;
    std::erase_if(re.challenge_responses, [&](const auto& kv) {
      const auto f = ext_policy.response_fields();
      return std::find(f.begin(), f.end(), kv.first) == f.end();
    });
    const bool base_ok = enroll(rb, store, ring, base_policy, kNow).accepted;
    const bool ext_ok = enroll(re, store, ring, ext_policy, kNow).accepted;
    if (!base_ok) EXPECT_FALSE(ext_ok) << base << " vs " << extended;
  }
}

// Quota is consumed exactly when a new token is minted.
TEST(EnrollProperty, MintsIffQuotaConsumed) {
  std::mt19937 rng(33);
  const auto ring = testing::test_keyring();
  const auto policy = ChallengePolicy::from_json(R"([{"id": "otp", "kind": "totp"}])");
  auto store = testing::fast_store();
  for (int i = 0; i < 4; ++i) store.add_user(testing::user("u" + std::to_string(i), rng() % 4));
  std::map<std::string, std::uint64_t> expected;
  for (const auto& rec : store.snapshot().records) expected[rec.username] = rec.sso_jwt_count;
  std::map<std::string, std::string> tokens;
  for (int step = 0; step < 400; ++step) {
    const std::string name = "u" + std::to_string(rng() % 4);
    EnrollmentRequest r;
    r.username = name;
    r.password = rng() % 5 ? name + "-password" : "wrong";
    if (rng() % 6) r.challenge_responses["otp"] = oracle::totp("12345678901234567890", kNow);
    if (rng() % 3 == 0 && tokens.contains(name)) r.presented_token = tokens[name];
    if (rng() % 10 == 0) {
      store.increment_count(name);
      ++expected[name];
    }
    const auto out = enroll(r, store, ring, policy, kNow);
    if (out.accepted && !out.reused) {
      ASSERT_GT(expected[name], 0u);
      --expected[name];
      tokens[name] = out.token;
      ASSERT_EQ(verify_token(out.token, kNow, ring).claims().version,
                *store.read_version(out.ouid));
    }
    if (out.accepted) ASSERT_EQ(out.reused, out.token.empty());
    ASSERT_EQ(store.find_by_username(name)->sso_jwt_count, expected[name]);
  }
}

}  // namespace
}  // namespace tulip
