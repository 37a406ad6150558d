#include "tulip/config.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tulip/cidr.h"
#include "tulip/error.h"

namespace tulip {
namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  return obj.at(key);
}

std::string string_field(const json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError("'" + name + "' must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const json& v, const std::string& name) {
  if (!v.is_array()) throw ConfigError("'" + name + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(string_field(e, name));
  return out;
}

bool bool_field(const json& v, const std::string& name) {
  if (!v.is_boolean()) throw ConfigError("'" + name + "' must be a boolean");
  return v.get<bool>();
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).lexically_normal().string();
}

}  // namespace

ServiceConfig ServiceConfig::parse(std::string_view json_text, const std::string& base_dir) {
  auto doc = json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config is not valid JSON");
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  check_keys(doc,
             {"listen", "keyring_path", "store_path", "enrollment_allowlist",
              "token_lifetime_seconds", "cookie", "challenges", "admin_secret_file", "asset_dir",
              "event_log_path", "audit_log_path", "trusted_proxies", "trust_forwarded_for",
              "gate_mode", "password_hash", "dev_insecure"},
             "config");

  ServiceConfig c;
  const json& listen = require(doc, "listen", "config");
  if (!listen.is_object()) throw ConfigError("'listen' must be an object");
  check_keys(listen, {"host", "port"}, "listen");
  c.listen_host = string_field(require(listen, "host", "listen"), "listen.host");
  const json& port = require(listen, "port", "listen");
  if (!port.is_number_integer() || port.get<int>() < 0 || port.get<int>() > 65535) {
    throw ConfigError("'listen.port' must be an integer in [0, 65535]");
  }
  c.listen_port = port.get<int>();

  c.keyring_path = resolve(base_dir, string_field(require(doc, "keyring_path", "config"), "keyring_path"));
  c.store_path = resolve(base_dir, string_field(require(doc, "store_path", "config"), "store_path"));
  c.enrollment_allowlist =
      string_list(require(doc, "enrollment_allowlist", "config"), "enrollment_allowlist");
  CidrList::parse(c.enrollment_allowlist);

  if (doc.contains("token_lifetime_seconds")) {
    const json& v = doc["token_lifetime_seconds"];
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
      throw ConfigError("'token_lifetime_seconds' must be a positive integer");
    }
    c.token_lifetime = v.get<std::int64_t>();
  }
  c.cookie.max_age = c.token_lifetime;

  if (doc.contains("cookie")) {
    const json& ck = doc["cookie"];
    if (!ck.is_object()) throw ConfigError("'cookie' must be an object");
    check_keys(ck, {"name", "same_site"}, "cookie");
    if (ck.contains("name")) {
      c.cookie.name = string_field(ck["name"], "cookie.name");
      if (c.cookie.name.empty() ||
          c.cookie.name.find_first_of("=;, \t\"") != std::string::npos) {
        throw ConfigError("'cookie.name' is not a valid cookie name");
      }
    }
    if (ck.contains("same_site")) {
      const std::string s = string_field(ck["same_site"], "cookie.same_site");
      if (s == "lax") {
        c.cookie.same_site = SameSite::kLax;
      } else if (s == "strict") {
        c.cookie.same_site = SameSite::kStrict;
      } else {
        throw ConfigError("'cookie.same_site' must be \"lax\" or \"strict\"");
      }
    }
  }

  if (doc.contains("challenges")) c.challenges = ChallengePolicy::from_json(doc["challenges"].dump());

  if (doc.contains("admin_secret_file")) {
    c.admin_secret_file = resolve(base_dir, string_field(doc["admin_secret_file"], "admin_secret_file"));
  }
  if (doc.contains("asset_dir")) c.asset_dir = resolve(base_dir, string_field(doc["asset_dir"], "asset_dir"));
  if (doc.contains("event_log_path")) {
    c.event_log_path = resolve(base_dir, string_field(doc["event_log_path"], "event_log_path"));
  }
  if (doc.contains("audit_log_path")) {
    c.audit_log_path = resolve(base_dir, string_field(doc["audit_log_path"], "audit_log_path"));
  }
  if (doc.contains("trusted_proxies")) {
    c.trusted_proxies = string_list(doc["trusted_proxies"], "trusted_proxies");
    CidrList::parse(c.trusted_proxies);
  }
  if (doc.contains("trust_forwarded_for")) {
    c.trust_forwarded_for = bool_field(doc["trust_forwarded_for"], "trust_forwarded_for");
  }
  if (doc.contains("gate_mode")) {
    const std::string mode = string_field(doc["gate_mode"], "gate_mode");
    if (mode == "tulip") {
      c.gate_mode = GateMode::kEnforce;
    } else if (mode == "baseline") {
      c.gate_mode = GateMode::kBypass;
    } else {
      throw ConfigError("'gate_mode' must be \"tulip\" or \"baseline\"");
    }
  }
  if (doc.contains("password_hash")) {
    const json& ph = doc["password_hash"];
    if (!ph.is_object()) throw ConfigError("'password_hash' must be an object");
    check_keys(ph, {"log2_n", "r", "p"}, "password_hash");
    auto number = [&](const char* key, std::uint64_t lo, std::uint64_t hi, std::uint64_t fallback) {
      if (!ph.contains(key)) return fallback;
      const json& v = ph[key];
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() < lo || v.get<std::uint64_t>() > hi) {
        throw ConfigError(std::string("'password_hash.") + key + "' out of range");
      }
      return v.get<std::uint64_t>();
    };
    c.password_hash.log2_n = number("log2_n", 1, 24, c.password_hash.log2_n);
    c.password_hash.r = static_cast<std::uint32_t>(number("r", 1, 64, c.password_hash.r));
    c.password_hash.p = static_cast<std::uint32_t>(number("p", 1, 16, c.password_hash.p));
  }
  if (doc.contains("dev_insecure")) c.dev_insecure = bool_field(doc["dev_insecure"], "dev_insecure");
  return c;
}

ServiceConfig ServiceConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  return parse(buf.str(), parent.empty() ? "." : parent.string());
}

}  // namespace tulip
