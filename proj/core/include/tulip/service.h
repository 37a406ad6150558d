#ifndef TULIP_SERVICE_H_
#define TULIP_SERVICE_H_

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "tulip/admin.h"
#include "tulip/cidr.h"
#include "tulip/clock.h"
#include "tulip/config.h"
#include "tulip/cookie.h"
#include "tulip/enrollment.h"
#include "tulip/event_log.h"
#include "tulip/http_message.h"
#include "tulip/identity_store.h"
#include "tulip/keyring.h"
#include "tulip/login_gate.h"

namespace tulip {

struct ServiceOptions {
  CookiePolicy cookie;
  std::int64_t token_lifetime = kDefaultTokenLifetime;
  ChallengePolicy challenges;
  CidrList enrollment_allowlist;
  // Empty disables /admin.
  std::string admin_secret;
  std::string asset_dir;
  CidrList trusted_proxies;
  bool trust_forwarded_for = false;
  GateMode gate_mode = GateMode::kEnforce;
  // Allow issuing cookies on requests that did not arrive over TLS.
  bool dev_insecure = false;
  // Persist the store here after every mutation; empty to skip.
  std::string store_path;

  static ServiceOptions from_config(const ServiceConfig& config);
};

// Counters exposed on POST /admin/stats.
struct ServiceStats {
  std::uint64_t requests = 0;
  std::uint64_t credential_verifications = 0;
  std::uint64_t version_reads = 0;
  std::uint64_t store_accesses = 0;
  std::uint64_t mfa_prompts = 0;
  std::uint64_t enroll_handler_runs = 0;
  std::uint64_t admin_handler_runs = 0;
  std::uint64_t sessions_granted = 0;

  std::string to_json() const;
  static ServiceStats from_json(std::string_view text);
};

// Routes:
//   GET  /healthz
//   GET  /enroll, GET /enroll/descriptor, POST /enroll   (allowlisted, else 404)
//   GET  /login, POST /login                            (gated, else 401)
//   POST /admin/<verb>, POST /admin/stats               (allowlisted + bearer secret)
//   GET  /static/<file>                                 (asset_dir)
//
// Every rejection on /login is the same 401 response whatever the reason.
class Service {
 public:
  Service(UserDirectory& store, KeyringHolder& keyring, const Clock& clock, ServiceOptions options,
          EventLog& events, AuditLog& audit, MfaProvider* mfa = nullptr);

  HttpResponse handle(const HttpRequest& request);

  ServiceStats stats() const;
  GateMode gate_mode() const { return options_.gate_mode; }
  const ServiceOptions& options() const { return options_; }

  // The fixed /login rejection.
  static HttpResponse gate_rejection();

 private:
  class CountingMfa;

  std::string client_address(const HttpRequest& request) const;
  bool secure_transport(const HttpRequest& request) const;
  std::optional<std::string> presented_token(const HttpRequest& request) const;

  HttpResponse get_enroll(const HttpRequest& request);
  HttpResponse enroll_descriptor();
  HttpResponse post_enroll(const HttpRequest& request, const std::string& client);
  HttpResponse get_login(const HttpRequest& request);
  HttpResponse post_login(const HttpRequest& request);
  HttpResponse admin(const HttpRequest& request, std::string_view verb);
  HttpResponse static_asset(std::string_view relative);
  HttpResponse healthz();

  void log(const std::string& route, std::string verdict, std::string reason, std::string ouid);
  void persist_store();

  UserDirectory& inner_store_;
  CountingDirectory store_;
  KeyringHolder& keyring_;
  const Clock& clock_;
  ServiceOptions options_;
  EventLog& events_;
  AuditLog& audit_;
  Admin admin_;
  MfaProvider* mfa_;

  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> mfa_prompts_{0};
  std::atomic<std::uint64_t> enroll_runs_{0};
  std::atomic<std::uint64_t> admin_runs_{0};
  std::atomic<std::uint64_t> sessions_granted_{0};

  std::mutex persist_mu_;
  std::mutex sessions_mu_;
  // Session stub: where an IdP would continue with SAML/OIDC.
  std::unordered_map<std::string, std::string> sessions_;
};

}  // namespace tulip

#endif  // TULIP_SERVICE_H_
