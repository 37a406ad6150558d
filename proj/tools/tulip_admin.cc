// tulip-admin: provisioning, revocation and quota management.
//
// Against a store file (service stopped):
//   tulip-admin --store users.json bump-version alice
// Against a running service, from an allowlisted address:
//   tulip-admin --url http://10.0.0.5:8080 --admin-token "$T" global-bump

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "httplib.h"
#include "tulip/admin.h"
#include "tulip/clock.h"
#include "tulip/crypto.h"
#include "tulip/error.h"
#include "tulip/identity_store.h"
#include "tulip/keyring.h"

namespace {

tulip::AdminResult run_local(const tulip::AdminCommand& cmd, const std::string& store_path,
                             const std::string& audit_path, const tulip::PasswordHashParams& params) {
  std::unique_ptr<tulip::MemoryDirectory> store;
  if (std::filesystem::exists(store_path)) {
    store = std::make_unique<tulip::MemoryDirectory>(tulip::load(store_path), params);
  } else if (cmd.verb == tulip::AdminVerb::kAddUser) {
    store = std::make_unique<tulip::MemoryDirectory>(params);
  } else {
    throw tulip::StoreError("no store at " + store_path);
  }
  tulip::AuditLog audit(audit_path.empty() ? store_path + ".audit.jsonl" : audit_path);
  tulip::SystemClock clock;
  tulip::Admin admin(*store, audit, clock);
  tulip::AdminResult result = admin.execute(cmd);
  if (tulip::is_mutating(cmd.verb)) tulip::persist(store->snapshot(), store_path);
  return result;
}

tulip::AdminResult run_remote(const tulip::AdminCommand& cmd, const std::string& url,
                              const std::string& token) {
  httplib::Client client(url);
  if (!client.is_valid()) throw tulip::InvalidArgument("invalid URL " + url);
  client.set_connection_timeout(5);
  httplib::Headers headers = {{"Authorization", "Bearer " + token}};
  auto res = client.Post("/admin/" + std::string(tulip::to_string(cmd.verb)), headers, cmd.to_json(),
                         "application/json");
  if (!res) throw tulip::Error("request failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw tulip::Error("service answered " + std::to_string(res->status) + ": " + res->body);
  }
  return tulip::AdminResult::from_json(res->body);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TULIP administration"};
  app.require_subcommand(1);

  std::string store_path;
  std::string audit_path;
  std::string url;
  std::string admin_token;
  bool json_output = false;
  bool fast_hash = false;
  auto* store_opt = app.add_option("--store", store_path, "User store file");
  app.add_option("--audit", audit_path, "Audit log (default: <store>.audit.jsonl)")->needs(store_opt);
  auto* url_opt = app.add_option("--url", url, "Base URL of a running service")->excludes(store_opt);
  app.add_option("--admin-token", admin_token, "Admin bearer secret")
      ->envname("TULIP_ADMIN_TOKEN")
      ->needs(url_opt);
  app.add_flag("--json", json_output, "Print the result as JSON");
  app.add_flag("--fast-hash", fast_hash, "Cheap password hashing (tests only)");

  tulip::AdminCommand cmd;
  std::vector<std::string> attrs;

  auto* add = app.add_subcommand("add-user", "Provision a user");
  add->add_option("username", cmd.target)->required();
  add->add_option("--password", cmd.password)->required();
  add->add_option("--count", cmd.count, "Enrollments allowed")->default_val(3);
  add->add_option("--totp-secret", cmd.totp_secret, "Base32 TOTP secret");
  add->add_flag("--group-member", cmd.group_member);
  add->add_option("--attr", attrs, "Directory attribute key=value");

  auto* bump = app.add_subcommand("bump-version", "Revoke every token issued to a user");
  bump->add_option("username", cmd.target)->required();
  app.add_subcommand("global-bump", "Revoke every token issued to anyone");
  auto* set = app.add_subcommand("set-count", "Set the remaining enrollment count");
  set->add_option("username", cmd.target)->required();
  set->add_option("count", cmd.count)->required()->check(CLI::NonNegativeNumber);
  auto* inc = app.add_subcommand("increment-count", "Allow one more enrollment");
  inc->add_option("username", cmd.target)->required();
  auto* rotate = app.add_subcommand("rotate-ouid", "Replace a user's opaque id");
  rotate->add_option("username", cmd.target)->required();
  auto* show = app.add_subcommand("show-user", "Print a user record");
  show->add_option("username", cmd.target)->required();

  std::string keyring_out;
  std::string key_id = "k1";
  auto* genkey = app.add_subcommand("gen-keyring", "Write a new signing keyring, or rotate an existing one");
  genkey->add_option("path", keyring_out)->required();
  genkey->add_option("--kid", key_id, "Id of the new active key");

  CLI11_PARSE(app, argc, argv);

  try {
    if (genkey->parsed()) {
      tulip::SigningKeyring ring = tulip::SigningKeyring::generate(key_id);
      if (std::filesystem::exists(keyring_out)) {
        ring = tulip::SigningKeyring::load(keyring_out).rotated(key_id, tulip::random_bytes(32));
      }
      const std::string tmp = keyring_out + ".tmp";
      {
        std::ofstream out(tmp, std::ios::trunc);
        out << ring.to_json() << "\n";
        if (!out) throw tulip::Error("cannot write " + tmp);
      }
      std::filesystem::permissions(tmp, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write);
      std::filesystem::rename(tmp, keyring_out);
      std::cout << "active key " << key_id << " written to " << keyring_out << "\n";
      return 0;
    }

    cmd.verb = *tulip::parse_admin_verb(app.get_subcommands().front()->get_name());
    for (const auto& a : attrs) {
      const auto eq = a.find('=');
      if (eq == std::string::npos || eq == 0) throw tulip::InvalidArgument("--attr expects key=value");
      cmd.attributes[a.substr(0, eq)] = a.substr(eq + 1);
    }
    if (store_path.empty() && url.empty()) throw tulip::InvalidArgument("one of --store or --url is required");
    const tulip::PasswordHashParams params =
        fast_hash ? tulip::PasswordHashParams::fast_for_testing() : tulip::PasswordHashParams{};
    const tulip::AdminResult result =
        url.empty() ? run_local(cmd, store_path, audit_path, params) : run_remote(cmd, url, admin_token);
    std::cout << (json_output ? result.to_json() : result.summary()) << "\n";
  } catch (const tulip::UnknownUserError& e) {
    std::cerr << "tulip-admin: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "tulip-admin: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
