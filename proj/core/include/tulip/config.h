#ifndef TULIP_CONFIG_H_
#define TULIP_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tulip/cookie.h"
#include "tulip/enrollment.h"
#include "tulip/login_gate.h"
#include "tulip/password.h"

namespace tulip {

// Service configuration, read from a JSON file. Parsing is strict: unknown
// keys and missing required keys are ConfigErrors. Relative paths are
// resolved against the config file's directory.
//
//   {
//     "listen": {"host": "127.0.0.1", "port": 8080},          required
//     "keyring_path": "keys.json",                            required
//     "store_path": "users.json",                             required
//     "enrollment_allowlist": ["10.0.0.0/8"],                 required
//     "token_lifetime_seconds": 15552000,
//     "cookie": {"name": "tulip_token", "same_site": "lax"},
//     "challenges": [{"id": "otp", "kind": "totp"}],
//     "admin_secret_file": "admin.secret",
//     "asset_dir": "assets",
//     "event_log_path": "events.jsonl",
//     "audit_log_path": "audit.jsonl",
//     "trusted_proxies": ["127.0.0.1"],
//     "trust_forwarded_for": false,
//     "gate_mode": "tulip" | "baseline",
//     "password_hash": {"log2_n": 15, "r": 8, "p": 1},
//     "dev_insecure": false
//   }
struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  CookiePolicy cookie;
  std::int64_t token_lifetime = kDefaultTokenLifetime;
  std::string keyring_path;
  std::string store_path;
  ChallengePolicy challenges;
  std::vector<std::string> enrollment_allowlist;
  std::string admin_secret_file;
  std::string asset_dir;
  std::string event_log_path;
  std::string audit_log_path;
  std::vector<std::string> trusted_proxies;
  bool trust_forwarded_for = false;
  GateMode gate_mode = GateMode::kEnforce;
  PasswordHashParams password_hash;
  bool dev_insecure = false;

  static ServiceConfig parse(std::string_view json_text, const std::string& base_dir = ".");
  static ServiceConfig load(const std::string& path);
};

}  // namespace tulip

#endif  // TULIP_CONFIG_H_
