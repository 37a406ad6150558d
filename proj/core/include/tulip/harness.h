#ifndef TULIP_HARNESS_H_
#define TULIP_HARNESS_H_

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tulip/admin.h"
#include "tulip/clock.h"
#include "tulip/error.h"
#include "tulip/event_log.h"
#include "tulip/http_message.h"
#include "tulip/identity_store.h"
#include "tulip/keyring.h"
#include "tulip/login_gate.h"
#include "tulip/service.h"

namespace tulip {

class HttpServer;

// Harness setup problems: unreachable service, mode mismatch, bad scenario.
class HarnessError : public Error {
 public:
  using Error::Error;
};

// Sends requests to a service, in process or over the network.
class Transport {
 public:
  virtual ~Transport() = default;
  // request.peer_address is the simulated client address; transports that
  // cannot set the socket peer forward it in X-Forwarded-For.
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

// Calls Service::handle directly. Requests are marked as TLS.
class DirectTransport final : public Transport {
 public:
  explicit DirectTransport(Service& service) : service_(service) {}
  HttpResponse send(const HttpRequest& request) override;

 private:
  Service& service_;
};

// Real HTTP to "http://host:port". Adds X-Forwarded-For with the simulated
// client address and X-Forwarded-Proto: https.
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(const std::string& base_url);
  ~HttpTransport() override;
  HttpResponse send(const HttpRequest& request) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// A simulated browser: one client address and a cookie jar holding the
// enrollment token.
class Browser {
 public:
  Browser(Transport& transport, std::string address, std::string cookie_name = "tulip_token")
      : transport_(transport), address_(std::move(address)), cookie_name_(std::move(cookie_name)) {}

  HttpResponse get(const std::string& path);
  HttpResponse post_form(const std::string& path, const FormFields& fields);

  const std::optional<std::string>& token() const { return token_; }
  void set_token(std::optional<std::string> token) { token_ = std::move(token); }
  void clear_cookies() { token_.reset(); }
  const std::string& address() const { return address_; }

 private:
  HttpResponse send(HttpRequest request);

  Transport& transport_;
  std::string address_;
  std::string cookie_name_;
  std::optional<std::string> token_;
};

// Stand-in for a push-MFA app. Logins a user starts themselves are
// approved; unsolicited prompts are counted and approved with probability
// `accept_probability`, drawn from a per-user stream so results do not
// depend on thread scheduling.
class SimulatedMfa final : public MfaProvider {
 public:
  SimulatedMfa(std::uint64_t seed, double accept_probability);

  bool approve(const std::string& username) override;

  // Marks `username` as currently signing in on their own device.
  void expect_login(const std::string& username);
  void clear_expectation(const std::string& username);

  std::uint64_t unsolicited_prompts() const { return unsolicited_; }
  std::uint64_t unsolicited_prompts(const std::string& username) const;
  std::uint64_t accepted_unsolicited() const { return accepted_; }

 private:
  std::uint64_t seed_;
  double accept_probability_;
  mutable std::mutex mu_;
  std::map<std::string, int> expected_;
  std::map<std::string, std::mt19937_64> streams_;
  std::map<std::string, std::uint64_t> per_user_;
  std::atomic<std::uint64_t> unsolicited_{0};
  std::atomic<std::uint64_t> accepted_{0};
};

enum class ScenarioMode { kTulip, kBaseline };
enum class TransportKind { kDirect, kHttp };

std::string_view to_string(ScenarioMode m);

// Client addresses used by the simulation.
inline constexpr std::string_view kCorporateNetwork = "10.0.0.0/8";
inline constexpr std::string_view kAttackerAddress = "203.0.113.66";

// A self-contained service instance for simulation: in-memory store, fresh
// keyring, a fixed manual clock, a TOTP enrollment challenge ("otp") and a
// SimulatedMfa. With TransportKind::kHttp it also listens on an ephemeral
// loopback port.
class SimulatedDeployment {
 public:
  SimulatedDeployment(ScenarioMode mode, TransportKind transport, std::uint64_t mfa_seed,
                      double mfa_accept_probability);
  ~SimulatedDeployment();

  SimulatedDeployment(const SimulatedDeployment&) = delete;
  SimulatedDeployment& operator=(const SimulatedDeployment&) = delete;

  ScenarioMode mode() const { return mode_; }
  Transport& transport() { return *transport_; }
  Service& service() { return *service_; }
  UserDirectory& store() { return store_; }
  Admin& admin() { return *admin_; }
  SimulatedMfa& mfa() { return mfa_; }
  ManualClock& clock() { return clock_; }
  KeyringHolder& keyring() { return keyring_; }
  // "http://127.0.0.1:<port>" for kHttp, empty for kDirect.
  const std::string& base_url() const { return base_url_; }

  // Counts of "reject" events per reason class since the last reset.
  std::map<std::string, std::uint64_t> rejections() const;
  void reset_rejections();
  // Reason class of the most recent event for `route`.
  std::optional<std::string> last_reason(const std::string& route) const;

 private:
  ScenarioMode mode_;
  ManualClock clock_;
  MemoryDirectory store_;
  KeyringHolder keyring_;
  EventLog events_;
  AuditLog audit_;
  SimulatedMfa mfa_;
  std::unique_ptr<Admin> admin_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<HttpServer> server_;
  std::thread server_thread_;
  std::unique_ptr<Transport> transport_;
  std::string base_url_;

  mutable std::mutex events_mu_;
  std::map<std::string, std::uint64_t> rejections_;
  std::map<std::string, std::string> last_reason_;
};

// Population parameters: k users, n of whom have leaked credentials, each
// attacked `attacker_attempts_per_user` times.
struct ScenarioConfig {
  std::uint64_t k = 100;
  std::uint64_t n = 10;
  std::uint64_t attacker_attempts_per_user = 50;
  std::uint64_t seed = 1;
  ScenarioMode mode = ScenarioMode::kTulip;
  // Probability a careless user approves an unsolicited prompt.
  double mfa_accept_probability = 0.05;
  std::uint64_t initial_count = 3;
  TransportKind transport = TransportKind::kDirect;
  unsigned concurrency = 4;

  // Throws HarnessError when 0 <= n <= k or the probability range is violated.
  void validate() const;
  // Non-fatal remarks, e.g. n/k > 0.5.
  std::vector<std::string> warnings() const;

  // {"k":..,"n":..,"attacker_attempts_per_user":..,"seed":..,"mode":"tulip",
  //  "mfa_accept_probability":..,"initial_count":..,"transport":"direct",
  //  "concurrency":..}; unknown keys are rejected.
  static ScenarioConfig from_json(std::string_view text);
  std::string to_json() const;
};

struct UserOutcome {
  std::string username;
  bool compromised = false;
  bool enrolled = false;
  bool logged_in = false;
  std::uint64_t attacker_attempts = 0;
  std::uint64_t mfa_prompts = 0;
  bool breached = false;

  bool operator==(const UserOutcome&) const = default;
};

struct ScenarioReport {
  ScenarioMode mode = ScenarioMode::kTulip;
  std::uint64_t seed = 0;
  std::uint64_t breaches = 0;
  std::uint64_t mfa_prompts_triggered = 0;
  // Credential verifications caused by attacker requests.
  std::uint64_t attacker_credential_checks = 0;
  std::map<std::string, std::uint64_t> gate_rejections;
  std::uint64_t honest_enrolled = 0;
  std::uint64_t honest_logins = 0;
  std::vector<UserOutcome> users;

  bool operator==(const ScenarioReport&) const = default;

  // In tulip mode: no breach, no unsolicited prompt, no credential check
  // reachable by an attacker, and every honest user got in.
  bool tulip_invariants_hold() const;
  std::string to_json() const;
};

// Provisions the population into `deployment`, runs the honest phase (enroll
// then log in) and the attack phase (direct form POSTs with stolen
// credentials and no token), and aggregates the result. Deterministic for a
// given config. Throws HarnessError on mode mismatch or when the service is
// unreachable.
ScenarioReport run_scenario(const ScenarioConfig& config, SimulatedDeployment& deployment);

// Builds a fresh deployment matching `config` and runs it.
ScenarioReport run_scenario(const ScenarioConfig& config);

// Probability that at least one of n*a independent prompts, each approved
// with probability p, is approved: 1 - (1 - p)^(n a).
double analytic_breach_probability(double p, std::uint64_t n, std::uint64_t attempts);

struct BreachFrequency {
  double empirical = 0;
  double analytic = 0;
  std::uint64_t runs = 0;
  std::uint64_t runs_with_breach = 0;
};

// Runs `seeds` scenarios (seed, seed+1, ...) and compares the fraction
// with at least one breach to the analytic value.
BreachFrequency estimate_breach_frequency(ScenarioConfig config, std::uint64_t seeds);

enum class AttackVariant {
  kNoTokenGet,      // (a) GET /login without a token
  kDirectPost,      // (b) POST /login form bytes directly
  kRevokedReplay,   // (c) replay a token revoked by a version bump
  kForgedToken,     // (d) token signed with a guessed key
  kStolenCookie,    // (e) copied valid cookie (physical access)
};

std::string_view to_string(AttackVariant v);

struct VariantOutcome {
  AttackVariant variant = AttackVariant::kNoTokenGet;
  bool skipped = false;
  int status = 0;
  bool login_form_served = false;
  bool session_granted = false;
  std::optional<std::uint64_t> credential_checks;
  std::optional<std::uint64_t> mfa_prompts;
  // Server-side reason class, when observable.
  std::optional<std::string> reason;
  std::string detail;

  bool succeeded() const { return login_form_served || session_granted; }
};

struct PlaybookReport {
  std::vector<VariantOutcome> outcomes;

  // Only (e) succeeds, and (a)-(d) caused no credential checks or prompts.
  bool as_expected() const;
  std::string to_json() const;
};

// What the playbook needs from the system under attack.
class PlaybookTarget {
 public:
  virtual ~PlaybookTarget() = default;
  virtual Transport& transport() = 0;
  virtual std::optional<ServiceStats> stats() = 0;
  // A cookie issued to the victim's enrolled device, still valid.
  virtual std::optional<std::string> victim_cookie() = 0;
  // A cookie issued to the victim and then revoked.
  virtual std::optional<std::string> revoked_cookie() = 0;
  virtual std::optional<std::string> last_login_reason() { return std::nullopt; }
  virtual std::string username() const = 0;
  virtual std::string password() const = 0;
};

// Target backed by a SimulatedDeployment: the victim enrolls on the corporate
// network and revocation is a global bump.
class DeploymentTarget final : public PlaybookTarget {
 public:
  explicit DeploymentTarget(SimulatedDeployment& deployment);

  Transport& transport() override { return deployment_.transport(); }
  std::optional<ServiceStats> stats() override { return deployment_.service().stats(); }
  std::optional<std::string> victim_cookie() override;
  std::optional<std::string> revoked_cookie() override;
  std::optional<std::string> last_login_reason() override;
  std::string username() const override { return "victim"; }
  std::string password() const override { return password_; }

 private:
  std::optional<std::string> enroll_victim();

  SimulatedDeployment& deployment_;
  std::string password_;
  std::string totp_secret_;
};

// Target reached over HTTP. Stats come from POST /admin/stats when an admin
// token is supplied; cookies must be provided by the operator.
class RemoteTarget final : public PlaybookTarget {
 public:
  struct Options {
    std::string url;
    std::string username;
    std::string password;
    std::string admin_token;
    std::optional<std::string> valid_cookie;
    std::optional<std::string> revoked_cookie;
  };

  explicit RemoteTarget(Options options);

  Transport& transport() override { return transport_; }
  std::optional<ServiceStats> stats() override;
  std::optional<std::string> victim_cookie() override { return options_.valid_cookie; }
  std::optional<std::string> revoked_cookie() override { return options_.revoked_cookie; }
  std::string username() const override { return options_.username; }
  std::string password() const override { return options_.password; }

 private:
  Options options_;
  HttpTransport transport_;
};

PlaybookReport run_attacker_playbook(PlaybookTarget& target);

}  // namespace tulip

#endif  // TULIP_HARNESS_H_
