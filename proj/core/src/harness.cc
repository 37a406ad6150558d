#include "tulip/harness.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <set>

#include "httplib.h"
#include "json.hpp"
#include "tulip/crypto.h"
#include "tulip/encoding.h"
#include "tulip/http_server.h"
#include "tulip/token.h"
#include "tulip/totp.h"

namespace tulip {
namespace {

using nlohmann::json;

constexpr UnixTime kSimulationEpoch = 1'700'000'000;

std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Runs fn(i) for i in [0, count) on up to `threads` workers; rethrows the
// first exception.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

std::string corporate_address(std::size_t index) {
  return "10." + std::to_string((index >> 16) & 0xff) + "." + std::to_string((index >> 8) & 0xff) +
         "." + std::to_string(index & 0xff);
}

bool has_form(const HttpResponse& r) { return r.body.find("<form") != std::string::npos; }

ScenarioMode mode_from_string(const std::string& s) {
  if (s == "tulip") return ScenarioMode::kTulip;
  if (s == "baseline") return ScenarioMode::kBaseline;
  throw HarnessError("mode must be \"tulip\" or \"baseline\"");
}

}  // namespace

// Transports

HttpResponse DirectTransport::send(const HttpRequest& request) {
  HttpRequest r = request;
  r.tls = true;
  return service_.handle(r);
}

struct HttpTransport::Impl {
  explicit Impl(const std::string& url) : client(url) {
    client.set_connection_timeout(5);
    client.set_read_timeout(30);
    client.set_keep_alive(true);
    client.set_tcp_nodelay(true);
  }
  std::mutex mu;
  httplib::Client client;
};

HttpTransport::HttpTransport(const std::string& base_url) : impl_(std::make_unique<Impl>(base_url)) {
  if (!impl_->client.is_valid()) throw HarnessError("invalid service URL " + base_url);
}

HttpTransport::~HttpTransport() = default;

HttpResponse HttpTransport::send(const HttpRequest& request) {
  httplib::Headers headers;
  std::string content_type = "application/octet-stream";
  for (const auto& [k, v] : request.headers) {
    if (k == "Content-Type") {
      content_type = v;
    } else {
      headers.emplace(k, v);
    }
  }
  if (!request.peer_address.empty()) headers.emplace("X-Forwarded-For", request.peer_address);
  headers.emplace("X-Forwarded-Proto", "https");

  std::lock_guard lock(impl_->mu);
  httplib::Result res = request.method == "POST"
                            ? impl_->client.Post(request.path, headers, request.body, content_type)
                            : impl_->client.Get(request.path, headers);
  if (!res) throw HarnessError("service unreachable: " + httplib::to_string(res.error()));
  HttpResponse out;
  out.status = res->status;
  for (const auto& [k, v] : res->headers) out.headers.emplace_back(k, v);
  out.body = res->body;
  return out;
}

// Browser

HttpResponse Browser::send(HttpRequest request) {
  request.peer_address = address_;
  if (token_) request.headers.emplace_back("Cookie", cookie_name_ + "=" + *token_);
  HttpResponse response = transport_.send(request);
  for (const auto& [k, v] : response.headers) {
    if (k.size() != 10 || !std::equal(k.begin(), k.end(), "set-cookie", [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == b;
        })) {
      continue;
    }
    const std::string prefix = cookie_name_ + "=";
    if (v.rfind(prefix, 0) != 0) continue;
    token_ = v.substr(prefix.size(), v.find(';') - prefix.size());
  }
  return response;
}

HttpResponse Browser::get(const std::string& path) {
  HttpRequest r;
  r.method = "GET";
  r.path = path;
  return send(std::move(r));
}

HttpResponse Browser::post_form(const std::string& path, const FormFields& fields) {
  HttpRequest r;
  r.method = "POST";
  r.path = path;
  r.headers.emplace_back("Content-Type", "application/x-www-form-urlencoded");
  r.body = encode_form(fields);
  return send(std::move(r));
}

// SimulatedMfa

SimulatedMfa::SimulatedMfa(std::uint64_t seed, double accept_probability)
    : seed_(seed), accept_probability_(accept_probability) {}

bool SimulatedMfa::approve(const std::string& username) {
  std::lock_guard lock(mu_);
  if (auto it = expected_.find(username); it != expected_.end() && it->second > 0) return true;
  ++unsolicited_;
  ++per_user_[username];
  auto stream = streams_.find(username);
  if (stream == streams_.end()) {
    stream = streams_.emplace(username, std::mt19937_64(fnv1a(username, seed_))).first;
  }
  const bool accepted = unit_draw(stream->second) < accept_probability_;
  if (accepted) ++accepted_;
  return accepted;
}

void SimulatedMfa::expect_login(const std::string& username) {
  std::lock_guard lock(mu_);
  ++expected_[username];
}

void SimulatedMfa::clear_expectation(const std::string& username) {
  std::lock_guard lock(mu_);
  if (auto it = expected_.find(username); it != expected_.end() && it->second > 0) --it->second;
}

std::uint64_t SimulatedMfa::unsolicited_prompts(const std::string& username) const {
  std::lock_guard lock(mu_);
  auto it = per_user_.find(username);
  return it == per_user_.end() ? 0 : it->second;
}

std::string_view to_string(ScenarioMode m) {
  return m == ScenarioMode::kTulip ? "tulip" : "baseline";
}

// SimulatedDeployment

SimulatedDeployment::SimulatedDeployment(ScenarioMode mode, TransportKind transport,
                                         std::uint64_t mfa_seed, double mfa_accept_probability)
    : mode_(mode),
      clock_(kSimulationEpoch),
      store_(PasswordHashParams::fast_for_testing()),
      keyring_(SigningKeyring::generate("sim-1")),
      events_(nullptr, 0),
      mfa_(mfa_seed, mfa_accept_probability) {
  events_.set_observer([this](const RequestEvent& e) {
    std::lock_guard lock(events_mu_);
    last_reason_[e.route] = e.reason;
    if (e.verdict == "reject") ++rejections_[e.reason];
  });
  ServiceOptions options;
  options.challenges = ChallengePolicy::from_json(R"([{"id":"otp","kind":"totp"}])");
  options.enrollment_allowlist = CidrList::parse({std::string(kCorporateNetwork), "127.0.0.0/8"});
  options.admin_secret = hex_encode(random_bytes(16));
  options.trusted_proxies = CidrList::parse({"127.0.0.1/32", "::1/128"});
  options.trust_forwarded_for = true;
  options.gate_mode = mode == ScenarioMode::kTulip ? GateMode::kEnforce : GateMode::kBypass;
  admin_ = std::make_unique<Admin>(store_, audit_, clock_);
  service_ = std::make_unique<Service>(store_, keyring_, clock_, options, events_, audit_, &mfa_);
  if (transport == TransportKind::kHttp) {
    server_ = std::make_unique<HttpServer>(*service_);
    const int port = server_->bind("127.0.0.1", 0);
    server_thread_ = std::thread([this] { server_->serve(); });
    base_url_ = "http://127.0.0.1:" + std::to_string(port);
    transport_ = std::make_unique<HttpTransport>(base_url_);
  } else {
    transport_ = std::make_unique<DirectTransport>(*service_);
  }
}

SimulatedDeployment::~SimulatedDeployment() {
  transport_.reset();
  if (server_) server_->stop();
  if (server_thread_.joinable()) server_thread_.join();
}

std::map<std::string, std::uint64_t> SimulatedDeployment::rejections() const {
  std::lock_guard lock(events_mu_);
  return rejections_;
}

void SimulatedDeployment::reset_rejections() {
  std::lock_guard lock(events_mu_);
  rejections_.clear();
}

std::optional<std::string> SimulatedDeployment::last_reason(const std::string& route) const {
  std::lock_guard lock(events_mu_);
  auto it = last_reason_.find(route);
  if (it == last_reason_.end()) return std::nullopt;
  return it->second;
}

// ScenarioConfig

void ScenarioConfig::validate() const {
  if (n > k) throw HarnessError("n must not exceed k");
  if (!(mfa_accept_probability >= 0.0 && mfa_accept_probability <= 1.0)) {
    throw HarnessError("mfa_accept_probability must be in [0, 1]");
  }
  if (concurrency == 0) throw HarnessError("concurrency must be at least 1");
}

std::vector<std::string> ScenarioConfig::warnings() const {
  std::vector<std::string> out;
  if (k > 0 && static_cast<double>(n) / static_cast<double>(k) > 0.5) {
    out.push_back("n/k > 0.5: compromised users are not a small minority");
  }
  return out;
}

ScenarioConfig ScenarioConfig::from_json(std::string_view text) {
  auto doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw HarnessError("scenario config must be a JSON object");
  static const std::set<std::string> kKeys = {
      "k", "n", "attacker_attempts_per_user", "seed", "mode", "mfa_accept_probability",
      "initial_count", "transport", "concurrency"};
  for (const auto& [key, _] : doc.items()) {
    if (!kKeys.contains(key)) throw HarnessError("scenario config: unknown key '" + key + "'");
  }
  ScenarioConfig c;
  auto unsigned_field = [&](const char* key, std::uint64_t& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_unsigned()) {
      throw HarnessError(std::string("scenario config: '") + key + "' must be a non-negative integer");
    }
    out = doc[key].get<std::uint64_t>();
  };
  unsigned_field("k", c.k);
  unsigned_field("n", c.n);
  unsigned_field("attacker_attempts_per_user", c.attacker_attempts_per_user);
  unsigned_field("seed", c.seed);
  unsigned_field("initial_count", c.initial_count);
  std::uint64_t concurrency = c.concurrency;
  unsigned_field("concurrency", concurrency);
  c.concurrency = static_cast<unsigned>(std::min<std::uint64_t>(concurrency, 256));
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) throw HarnessError("scenario config: 'mode' must be a string");
    c.mode = mode_from_string(doc["mode"].get<std::string>());
  }
  if (doc.contains("mfa_accept_probability")) {
    if (!doc["mfa_accept_probability"].is_number()) {
      throw HarnessError("scenario config: 'mfa_accept_probability' must be a number");
    }
    c.mfa_accept_probability = doc["mfa_accept_probability"].get<double>();
  }
  if (doc.contains("transport")) {
    const std::string t = doc["transport"].is_string() ? doc["transport"].get<std::string>() : "";
    if (t == "direct") {
      c.transport = TransportKind::kDirect;
    } else if (t == "http") {
      c.transport = TransportKind::kHttp;
    } else {
      throw HarnessError("scenario config: 'transport' must be \"direct\" or \"http\"");
    }
  }
  c.validate();
  return c;
}

std::string ScenarioConfig::to_json() const {
  return json{{"k", k},
              {"n", n},
              {"attacker_attempts_per_user", attacker_attempts_per_user},
              {"seed", seed},
              {"mode", std::string(to_string(mode))},
              {"mfa_accept_probability", mfa_accept_probability},
              {"initial_count", initial_count},
              {"transport", transport == TransportKind::kDirect ? "direct" : "http"},
              {"concurrency", concurrency}}
      .dump();
}

// ScenarioReport

bool ScenarioReport::tulip_invariants_hold() const {
  if (mode != ScenarioMode::kTulip) return true;
  return breaches == 0 && mfa_prompts_triggered == 0 && attacker_credential_checks == 0 &&
         honest_enrolled == users.size() && honest_logins == users.size();
}

std::string ScenarioReport::to_json() const {
  json users_json = json::array();
  for (const auto& u : users) {
    users_json.push_back({{"username", u.username},
                          {"compromised", u.compromised},
                          {"enrolled", u.enrolled},
                          {"logged_in", u.logged_in},
                          {"attacker_attempts", u.attacker_attempts},
                          {"mfa_prompts", u.mfa_prompts},
                          {"breached", u.breached}});
  }
  return json{{"mode", std::string(to_string(mode))},
              {"seed", seed},
              {"breaches", breaches},
              {"mfa_prompts_triggered", mfa_prompts_triggered},
              {"attacker_credential_checks", attacker_credential_checks},
              {"gate_rejections", gate_rejections},
              {"honest_enrolled", honest_enrolled},
              {"honest_logins", honest_logins},
              {"tulip_invariants_hold", tulip_invariants_hold()},
              {"users", users_json}}
      .dump(2);
}

// Scenario

ScenarioReport run_scenario(const ScenarioConfig& config, SimulatedDeployment& deployment) {
  config.validate();
  if (deployment.mode() != config.mode) throw HarnessError("mode mismatch between scenario and service");

  Transport& transport = deployment.transport();
  {
    HttpRequest health;
    health.method = "GET";
    health.path = "/healthz";
    const HttpResponse r = transport.send(health);
    if (r.status != 200) throw HarnessError("service unhealthy: status " + std::to_string(r.status));
    auto doc = json::parse(r.body, nullptr, false);
    if (doc.is_discarded() || doc.value("mode", "") != to_string(config.mode)) {
      throw HarnessError("mode mismatch between scenario and service");
    }
  }

  // Population.
  std::mt19937_64 rng(config.seed);
  struct Member {
    std::string username;
    std::string password;
    std::string totp_secret;
  };
  std::vector<Member> members(config.k);
  char name[32];
  for (std::size_t i = 0; i < config.k; ++i) {
    std::snprintf(name, sizeof name, "user%05zu", i);
    Bytes secret(20);
    for (auto& b : secret) b = static_cast<std::uint8_t>(rng());
    members[i] = {name, "pw-" + std::to_string(rng()), base32_encode(secret)};
    deployment.admin().add_user({members[i].username, members[i].password, config.initial_count,
                                 members[i].totp_secret, true, {}});
  }
  std::vector<std::size_t> order(config.k);
  for (std::size_t i = 0; i < config.k; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> compromised(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(config.n));
  std::sort(compromised.begin(), compromised.end());

  ScenarioReport report;
  report.mode = config.mode;
  report.seed = config.seed;
  report.users.resize(config.k);
  for (std::size_t i = 0; i < config.k; ++i) report.users[i].username = members[i].username;
  for (std::size_t i : compromised) report.users[i].compromised = true;

  // Honest phase: every user enrolls a device on the corporate network and
  // signs in with it.
  SimulatedMfa& mfa = deployment.mfa();
  parallel_for(config.k, config.concurrency, [&](std::size_t i) {
    const Member& m = members[i];
    Browser device(transport, corporate_address(i + 1));
    const auto key = base32_decode(m.totp_secret);
    const HttpResponse enrolled = device.post_form(
        "/enroll", {{"username", m.username},
                    {"password", m.password},
                    {"otp", totp_code(*key, deployment.clock().now())}});
    report.users[i].enrolled = enrolled.status == 200 && device.token().has_value();
    mfa.expect_login(m.username);
    const HttpResponse page = device.get("/login");
    if (page.status == 200 && has_form(page)) {
      const HttpResponse login =
          device.post_form("/login", {{"username", m.username}, {"password", m.password}});
      report.users[i].logged_in = login.status == 200;
    }
    mfa.clear_expectation(m.username);
  });

  // Attack phase: stolen credentials, no enrolled device.
  deployment.reset_rejections();
  const std::uint64_t checks_before = deployment.service().stats().credential_verifications;
  parallel_for(compromised.size(), config.concurrency, [&](std::size_t j) {
    const std::size_t i = compromised[j];
    const Member& m = members[i];
    Browser attacker(transport, std::string(kAttackerAddress));
    for (std::uint64_t a = 0; a < config.attacker_attempts_per_user; ++a) {
      ++report.users[i].attacker_attempts;
      const HttpResponse r =
          attacker.post_form("/login", {{"username", m.username}, {"password", m.password}});
      if (r.status == 200) {
        report.users[i].breached = true;
        break;
      }
    }
  });
  report.attacker_credential_checks =
      deployment.service().stats().credential_verifications - checks_before;
  report.gate_rejections = deployment.rejections();

  for (auto& u : report.users) {
    u.mfa_prompts = mfa.unsolicited_prompts(u.username);
    report.breaches += u.breached ? 1 : 0;
    report.honest_enrolled += u.enrolled ? 1 : 0;
    report.honest_logins += u.logged_in ? 1 : 0;
  }
  report.mfa_prompts_triggered = mfa.unsolicited_prompts();
  return report;
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  config.validate();
  SimulatedDeployment deployment(config.mode, config.transport, config.seed,
                                 config.mfa_accept_probability);
  return run_scenario(config, deployment);
}

double analytic_breach_probability(double p, std::uint64_t n, std::uint64_t attempts) {
  return 1.0 - std::pow(1.0 - p, static_cast<double>(n) * static_cast<double>(attempts));
}

BreachFrequency estimate_breach_frequency(ScenarioConfig config, std::uint64_t seeds) {
  BreachFrequency f;
  f.analytic = analytic_breach_probability(config.mfa_accept_probability, config.n,
                                           config.attacker_attempts_per_user);
  const std::uint64_t base = config.seed;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    config.seed = base + s;
    const ScenarioReport r = run_scenario(config);
    ++f.runs;
    if (r.breaches > 0) ++f.runs_with_breach;
  }
  f.empirical = f.runs == 0 ? 0.0 : static_cast<double>(f.runs_with_breach) / static_cast<double>(f.runs);
  return f;
}

// Playbook

std::string_view to_string(AttackVariant v) {
  switch (v) {
    case AttackVariant::kNoTokenGet: return "a_get_login_without_token";
    case AttackVariant::kDirectPost: return "b_direct_form_post";
    case AttackVariant::kRevokedReplay: return "c_revoked_token_replay";
    case AttackVariant::kForgedToken: return "d_forged_token";
    case AttackVariant::kStolenCookie: return "e_stolen_valid_cookie";
  }
  return "unknown";
}

bool PlaybookReport::as_expected() const {
  for (const auto& o : outcomes) {
    if (o.skipped) continue;
    if (o.variant == AttackVariant::kStolenCookie) {
      if (!o.login_form_served) return false;
      continue;
    }
    if (o.succeeded()) return false;
    if (o.credential_checks && *o.credential_checks != 0) return false;
    if (o.mfa_prompts && *o.mfa_prompts != 0) return false;
  }
  return true;
}

std::string PlaybookReport::to_json() const {
  json out = json::array();
  for (const auto& o : outcomes) {
    json j = {{"variant", std::string(to_string(o.variant))},
              {"skipped", o.skipped},
              {"status", o.status},
              {"login_form_served", o.login_form_served},
              {"session_granted", o.session_granted},
              {"succeeded", o.succeeded()},
              {"detail", o.detail}};
    j["credential_checks"] = o.credential_checks ? json(*o.credential_checks) : json(nullptr);
    j["mfa_prompts"] = o.mfa_prompts ? json(*o.mfa_prompts) : json(nullptr);
    j["reason"] = o.reason ? json(*o.reason) : json(nullptr);
    out.push_back(j);
  }
  return json{{"outcomes", out}, {"as_expected", as_expected()}}.dump(2);
}

DeploymentTarget::DeploymentTarget(SimulatedDeployment& deployment) : deployment_(deployment) {
  password_ = "victim-" + hex_encode(random_bytes(8));
  totp_secret_ = base32_encode(random_bytes(20));
  deployment_.admin().add_user({"victim", password_, 5, totp_secret_, true, {}});
}

std::optional<std::string> DeploymentTarget::enroll_victim() {
  Browser device(deployment_.transport(), "10.20.30.40");
  const auto key = base32_decode(totp_secret_);
  device.post_form("/enroll", {{"username", "victim"},
                               {"password", password_},
                               {"otp", totp_code(*key, deployment_.clock().now())}});
  return device.token();
}

std::optional<std::string> DeploymentTarget::victim_cookie() { return enroll_victim(); }

std::optional<std::string> DeploymentTarget::revoked_cookie() {
  auto token = enroll_victim();
  if (token) deployment_.admin().global_bump();
  return token;
}

std::optional<std::string> DeploymentTarget::last_login_reason() {
  return deployment_.last_reason("POST /login");
}

RemoteTarget::RemoteTarget(Options options)
    : options_(std::move(options)), transport_(options_.url) {}

std::optional<ServiceStats> RemoteTarget::stats() {
  if (options_.admin_token.empty()) return std::nullopt;
  HttpRequest r;
  r.method = "POST";
  r.path = "/admin/stats";
  r.headers.emplace_back("Authorization", "Bearer " + options_.admin_token);
  r.headers.emplace_back("Content-Type", "application/json");
  const HttpResponse res = transport_.send(r);
  if (res.status != 200) return std::nullopt;
  return ServiceStats::from_json(res.body);
}

PlaybookReport run_attacker_playbook(PlaybookTarget& target) {
  PlaybookReport report;
  Transport& transport = target.transport();
  const FormFields stolen = {{"username", target.username()}, {"password", target.password()}};

  // Runs `attack` and fills the stats deltas around it.
  auto measured = [&](AttackVariant variant, const std::function<void(VariantOutcome&)>& attack) {
    VariantOutcome o;
    o.variant = variant;
    const auto before = target.stats();
    attack(o);
    const auto after = target.stats();
    if (before && after) {
      o.credential_checks = after->credential_verifications - before->credential_verifications;
      o.mfa_prompts = after->mfa_prompts - before->mfa_prompts;
    }
    report.outcomes.push_back(std::move(o));
  };

  // GET then POST with whatever cookie the attacker holds.
  auto try_login = [&](Browser& b, VariantOutcome& o) {
    const HttpResponse page = b.get("/login");
    o.status = page.status;
    o.login_form_served = page.status == 200 && has_form(page);
    const HttpResponse post = b.post_form("/login", stolen);
    o.session_granted = post.status == 200;
    o.reason = target.last_login_reason();
  };

  measured(AttackVariant::kNoTokenGet, [&](VariantOutcome& o) {
    Browser b(transport, std::string(kAttackerAddress));
    const HttpResponse page = b.get("/login");
    o.status = page.status;
    o.login_form_served = page.status == 200 && has_form(page);
    o.detail = "GET /login with no cookie";
  });

  measured(AttackVariant::kDirectPost, [&](VariantOutcome& o) {
    Browser b(transport, std::string(kAttackerAddress));
    const HttpResponse post = b.post_form("/login", stolen);
    o.status = post.status;
    o.session_granted = post.status == 200;
    o.reason = target.last_login_reason();
    o.detail = "form POST of stolen credentials without a token";
  });

  std::optional<std::string> revoked = target.revoked_cookie();
  measured(AttackVariant::kRevokedReplay, [&](VariantOutcome& o) {
    if (!revoked) {
      o.skipped = true;
      o.detail = "no revoked cookie available";
      return;
    }
    Browser b(transport, std::string(kAttackerAddress));
    b.set_token(revoked);
    try_login(b, o);
    o.detail = "replay of a token issued before a version bump";
  });

  measured(AttackVariant::kForgedToken, [&](VariantOutcome& o) {
    // Reuse the kid from a real token when one is at hand; the key is a guess.
    std::string kid = "sim-1";
    if (revoked) {
      auto header = base64url_decode(revoked->substr(0, revoked->find('.')));
      if (header) {
        auto doc = json::parse(header->begin(), header->end(), nullptr, false);
        if (!doc.is_discarded() && doc.contains("kid") && doc["kid"].is_string()) kid = doc["kid"];
      }
    }
    const SigningKeyring guessed(kid, {{kid, random_bytes(32)}});
    EnrollmentToken claims{random_uuid(), 0, 0, 4'102'444'800, kid};
    Browser b(transport, std::string(kAttackerAddress));
    b.set_token(sign_token(claims, guessed));
    try_login(b, o);
    o.detail = "token signed with a guessed key";
  });

  std::optional<std::string> stolen_cookie = target.victim_cookie();
  measured(AttackVariant::kStolenCookie, [&](VariantOutcome& o) {
    if (!stolen_cookie) {
      o.skipped = true;
      o.detail = "no valid cookie available";
      return;
    }
    Browser b(transport, std::string(kAttackerAddress));
    b.set_token(stolen_cookie);
    try_login(b, o);
    o.detail = "valid cookie copied from the victim's device";
  });

  return report;
}

}  // namespace tulip
