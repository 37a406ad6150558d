#include <gtest/gtest.h>

#include "json.hpp"
#include "service_fixture.h"
#include "tulip/token.h"

namespace tulip {
namespace {

using testing::ServiceHarness;
using nlohmann::json;

bool has_form(const HttpResponse& r) { return r.body.find("<form") != std::string::npos; }

TEST(Service, Healthz) {
  ServiceHarness h;
  const auto r = h.get("/healthz", "203.0.113.9");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(json::parse(r.body)["mode"], "tulip");
}

TEST(Service, LoginWithoutCookieIs401WithoutForm) {
  ServiceHarness h;
  const auto r = h.get("/login", "203.0.113.9");
  EXPECT_EQ(r.status, 401);
  EXPECT_FALSE(has_form(r));
  EXPECT_EQ(r.body.find("password"), std::string::npos);
  EXPECT_EQ(r.header("Cache-Control"), "no-store");
  EXPECT_NE(r.body.find("data-view=\"gated_401\""), std::string::npos);
}

TEST(Service, EnrollThenLogin) {
  ServiceHarness h;
  const auto enrolled = h.post("/enroll", h.enroll_form());
  ASSERT_EQ(enrolled.status, 200);
  EXPECT_EQ(enrolled.header("Cache-Control"), "no-store");
  const auto sc = enrolled.header("Set-Cookie");
  ASSERT_TRUE(sc);
  EXPECT_EQ(sc->rfind("tulip_token=", 0), 0u);
  EXPECT_NE(sc->find("HttpOnly"), std::string::npos);
  EXPECT_NE(sc->find("Secure"), std::string::npos);
  EXPECT_NE(sc->find("SameSite=Lax"), std::string::npos);
  EXPECT_NE(enrolled.body.find("enroll_success"), std::string::npos);
  EXPECT_EQ(h.store.find_by_username("alice")->sso_jwt_count, 2u);

  const std::string token = h.enroll_alice();
  ASSERT_FALSE(token.empty());
  const auto page = h.get("/login", "198.51.100.20", token);
  EXPECT_EQ(page.status, 200);
  EXPECT_TRUE(has_form(page));
  EXPECT_EQ(page.header("Cache-Control"), "no-store");

  const auto login = h.post("/login", {{"username", "alice"}, {"password", "alice-password"}},
                            "198.51.100.20", token);
  EXPECT_EQ(login.status, 200);
  ASSERT_TRUE(login.header("Set-Cookie"));
  EXPECT_EQ(login.header("Set-Cookie")->rfind("tulip_session=", 0), 0u);
  EXPECT_EQ(h.service->stats().sessions_granted, 1u);
}

TEST(Service, EnrollOffNetworkIsInvisible) {
  ServiceHarness h;
  EXPECT_EQ(h.get("/enroll", "203.0.113.9").status, 404);
  EXPECT_EQ(h.get("/enroll/descriptor", "203.0.113.9").status, 404);
  const auto r = h.post("/enroll", h.enroll_form(), "203.0.113.9");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(r.body, h.get("/no-such-page", "203.0.113.9").body);
  EXPECT_EQ(h.service->stats().enroll_handler_runs, 0u);
  EXPECT_EQ(h.service->stats().store_accesses, 0u);
  EXPECT_EQ(h.store.find_by_username("alice")->sso_jwt_count, 3u);
}

TEST(Service, EnrollFormAndDescriptor) {
  ServiceHarness h;
  const auto page = h.get("/enroll");
  EXPECT_EQ(page.status, 200);
  EXPECT_NE(page.body.find("name=\"otp\""), std::string::npos);
  EXPECT_NE(page.body.find("/static/tulip.js"), std::string::npos);
  const auto d = h.get("/enroll/descriptor");
  EXPECT_EQ(d.status, 200);
  const json doc = json::parse(d.body);
  std::vector<std::string> names;
  for (const auto& f : doc["fields"]) names.push_back(f["name"]);
  EXPECT_EQ(names, (std::vector<std::string>{"username", "password", "otp"}));
  EXPECT_EQ(doc["fields"][2]["type"], "totp");
}

TEST(Service, ReusedTokenGetsNoNewCookie) {
  ServiceHarness h;
  const std::string token = h.enroll_alice();
  const auto again = h.post("/enroll", h.enroll_form(), "10.0.0.5", token);
  EXPECT_EQ(again.status, 200);
  EXPECT_FALSE(again.header("Set-Cookie"));
  EXPECT_NE(again.body.find("enroll_reused"), std::string::npos);
  EXPECT_EQ(h.store.find_by_username("alice")->sso_jwt_count, 2u);
}

TEST(Service, DeclinedEnrollmentsLookAlike) {
  ServiceHarness h;
  const auto wrong = h.post("/enroll", h.enroll_form("nope"));
  FormFields bad_otp = h.enroll_form();
  bad_otp["otp"] = "000000";
  const auto challenge = h.post("/enroll", bad_otp);
  FormFields ghost = h.enroll_form();
  ghost["username"] = "ghost";
  const auto unknown = h.post("/enroll", ghost);
  h.store.set_count("alice", 0);
  const auto exhausted = h.post("/enroll", h.enroll_form());
  EXPECT_EQ(wrong.status, 401);
  for (const auto* r : {&challenge, &unknown, &exhausted}) {
    EXPECT_EQ(r->canonical_bytes(), wrong.canonical_bytes());
  }
  EXPECT_NE(wrong.body.find("generic_failure"), std::string::npos);
}

TEST(Service, MalformedEnrollIs400) {
  ServiceHarness h;
  EXPECT_EQ(h.post("/enroll", {{"username", "alice"}}).status, 400);
  FormFields extra = h.enroll_form();
  extra["role"] = "admin";
  EXPECT_EQ(h.post("/enroll", extra).status, 400);
  HttpRequest r;
  r.method = "POST";
  r.path = "/enroll";
  r.peer_address = "10.0.0.5";
  r.tls = true;
  r.headers = {{"Content-Type", "application/json"}};
  r.body = R"({"username":"alice"})";
  EXPECT_EQ(h.service->handle(r).status, 400);
  r.headers = {{"Content-Type", "application/x-www-form-urlencoded"}};
  r.body = "username=%zz&password=x";
  EXPECT_EQ(h.service->handle(r).status, 400);
}

TEST(Service, PlaintextEnrollmentRefused) {
  ServiceHarness h;
  const auto r = h.post("/enroll", h.enroll_form(), "10.0.0.5", std::nullopt, false);
  EXPECT_EQ(r.status, 403);
  EXPECT_FALSE(r.header("Set-Cookie"));
  EXPECT_EQ(h.store.find_by_username("alice")->sso_jwt_count, 3u);
  h.options.dev_insecure = true;
  h.rebuild();
  EXPECT_EQ(h.post("/enroll", h.enroll_form(), "10.0.0.5", std::nullopt, false).status, 200);
}

TEST(Service, ForwardedHeadersTrustedOnlyFromProxy) {
  ServiceHarness h;
  HttpRequest r;
  r.method = "POST";
  r.path = "/enroll";
  r.headers = {{"Content-Type", "application/x-www-form-urlencoded"},
               {"X-Forwarded-For", "203.0.113.1, 10.1.1.1"},
               {"X-Forwarded-Proto", "https"}};
  r.body = encode_form(h.enroll_form());
  r.peer_address = "127.0.0.1";
  EXPECT_EQ(h.service->handle(r).status, 200);
  // Spoofed from outside: peer is not a proxy, so the header is ignored.
  r.peer_address = "203.0.113.1";
  EXPECT_EQ(h.service->handle(r).status, 404);
  // Proxy forwarding an outside client.
  r.peer_address = "127.0.0.1";
  r.headers[1].second = "10.1.1.1, 203.0.113.1";
  EXPECT_EQ(h.service->handle(r).status, 404);
}

TEST(Service, DirectLoginPostWithoutCookieNeverChecksCredentials) {
  ServiceHarness h;
  const auto r = h.post("/login", {{"username", "alice"}, {"password", "alice-password"}}, "203.0.113.9");
  EXPECT_EQ(r.status, 401);
  EXPECT_EQ(r.canonical_bytes(), Service::gate_rejection().canonical_bytes());
  EXPECT_EQ(h.service->stats().credential_verifications, 0u);
  EXPECT_EQ(h.service->stats().store_accesses, 0u);
}

TEST(Service, RejectionsIdenticalAcrossReasonClasses) {
  ServiceHarness h;
  const std::string valid = h.enroll_alice();
  const auto ring = h.keyring.get();
  const UserRecord alice = *h.store.find_by_username("alice");

  std::string tampered = valid;
  tampered.back() = tampered.back() == 'A' ? 'B' : 'A';
  UserRecord ghost = alice;
  ghost.sso_jwt_ouid = "00000000-0000-4000-8000-000000000000";
  const std::map<std::string, std::optional<std::string>> cases = {
      {"no_token", std::nullopt},
      {"bad_signature", tampered},
      {"expired", mint_token(alice, testing::kServiceNow - 1000, 10, *ring)},
      {"unknown_ouid", mint_token(ghost, testing::kServiceNow, 100, *ring)},
      {"version_mismatch", valid}};
  h.store.bump_version("alice");

  const std::string reference = Service::gate_rejection().canonical_bytes();
  for (const auto& [reason, token] : cases) {
    const auto g = h.get("/login", "203.0.113.9", token);
    const auto p = h.post("/login", {{"username", "alice"}, {"password", "alice-password"}}, "203.0.113.9", token);
    EXPECT_EQ(g.canonical_bytes(), reference) << reason;
    EXPECT_EQ(p.canonical_bytes(), reference) << reason;
    EXPECT_EQ(h.events.recent().back().reason, reason);
  }
  // A wrong password behind a valid token is the same 401 as well.
  h.store.set_count("alice", 1);
  const std::string fresh = h.enroll_alice();
  const auto wrong = h.post("/login", {{"username", "alice"}, {"password", "x"}}, "203.0.113.9", fresh);
  EXPECT_EQ(wrong.canonical_bytes(), reference);
  EXPECT_EQ(h.service->stats().credential_verifications, 3u);  // two enrollments, one login
}

TEST(Service, BaselineModeServesFormToAnyone) {
  ServiceHarness h(GateMode::kBypass);
  EXPECT_EQ(json::parse(h.get("/healthz").body)["mode"], "baseline");
  const auto page = h.get("/login", "203.0.113.9");
  EXPECT_EQ(page.status, 200);
  EXPECT_TRUE(has_form(page));
  EXPECT_EQ(h.post("/login", {{"username", "alice"}, {"password", "alice-password"}}, "203.0.113.9").status, 200);
}

TEST(Service, AdminRoutes) {
  ServiceHarness h;
  const std::string token = h.enroll_alice();
  EXPECT_EQ(h.admin("bump-version", R"({"target": "alice"})", "wrong-secret-xxxxxxx").status, 401);
  EXPECT_EQ(h.admin("bump-version", R"({"target": "alice"})", testing::kAdminSecret, "203.0.113.9").status, 404);
  EXPECT_EQ(h.audit.size(), 0u);

  const auto bumped = h.admin("bump-version", R"({"target": "alice"})");
  ASSERT_EQ(bumped.status, 200);
  const auto result = AdminResult::from_json(bumped.body);
  EXPECT_EQ(result.old_value, "0");
  EXPECT_EQ(result.new_value, "1");
  EXPECT_EQ(h.get("/login", "10.0.0.5", token).status, 401);
  EXPECT_EQ(h.audit.size(), 1u);

  EXPECT_EQ(h.admin("bump-version", R"({"target": "ghost"})").status, 404);
  EXPECT_EQ(h.admin("set-count", R"({"target": "alice", "count": -1})").status, 400);
  EXPECT_EQ(h.admin("drop-table", "{}").status, 404);
  const auto show = h.admin("show-user", R"({"target": "alice"})");
  EXPECT_EQ(show.status, 200);
  EXPECT_EQ(show.body.find("scrypt"), std::string::npos);
  EXPECT_EQ(show.body.find(testing::kTotpSecret), std::string::npos);

  const auto stats = ServiceStats::from_json(h.admin("stats", "").body);
  EXPECT_GE(stats.requests, 5u);
  EXPECT_EQ(stats.credential_verifications, 1u);

  h.options.admin_secret.clear();
  h.rebuild();
  EXPECT_EQ(h.admin("stats", "").status, 404);
}

TEST(Service, PersistsStoreAfterMutations) {
  ServiceHarness h(GateMode::kEnforce, true);
  h.enroll_alice();
  auto snap = load(h.options.store_path);
  ASSERT_EQ(snap.records.size(), 1u);
  EXPECT_EQ(snap.records[0].sso_jwt_count, 2u);
  h.admin("bump-version", R"({"target": "alice"})");
  snap = load(h.options.store_path);
  EXPECT_EQ(snap.records[0].sso_jwt_version, 1u);
}

TEST(Service, StaticAssets) {
  ServiceHarness h;
  const auto js = h.get("/static/tulip.js", "203.0.113.9");
  EXPECT_EQ(js.status, 200);
  EXPECT_EQ(js.body, "console.log('tulip');\n");
  EXPECT_EQ(js.header("Content-Type"), "text/javascript; charset=utf-8");
  EXPECT_EQ(h.get("/static/../secret.txt").status, 404);
  EXPECT_EQ(h.get("/static/./tulip.js").status, 404);
  EXPECT_EQ(h.get("/static/missing.css").status, 404);
  EXPECT_EQ(h.get("/static/").status, 404);
  h.options.asset_dir.clear();
  h.rebuild();
  EXPECT_EQ(h.get("/static/tulip.js").status, 404);
}

TEST(Service, EventLogCarriesReasonAndOuid) {
  ServiceHarness h;
  const std::string token = h.enroll_alice();
  h.get("/login", "10.0.0.5", token);
  const auto events = h.events.recent();
  ASSERT_GE(events.size(), 2u);
  EXPECT_EQ(events[events.size() - 2].route, "POST /enroll");
  EXPECT_EQ(events.back().route, "GET /login");
  EXPECT_EQ(events.back().verdict, "serve");
  EXPECT_EQ(events.back().ouid, h.store.find_by_username("alice")->sso_jwt_ouid);
}

TEST(Service, UnknownMethodsAndPaths) {
  ServiceHarness h;
  HttpRequest r;
  r.method = "DELETE";
  r.path = "/login";
  r.peer_address = "10.0.0.5";
  EXPECT_EQ(h.service->handle(r).status, 405);
  r.method = "GET";
  r.path = "/admin/stats";
  EXPECT_EQ(h.service->handle(r).status, 404);
}

}  // namespace
}  // namespace tulip
