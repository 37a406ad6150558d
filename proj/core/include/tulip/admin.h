#ifndef TULIP_ADMIN_H_
#define TULIP_ADMIN_H_

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tulip/clock.h"
#include "tulip/identity_store.h"

namespace tulip {

struct AuditEntry {
  UnixTime timestamp = 0;
  std::string command;
  std::string target;
  std::string old_value;
  std::string new_value;

  bool operator==(const AuditEntry&) const = default;
};

// Append-only audit trail. Entries are kept in memory and, when a path is
// given, appended to it as one JSON object per line.
class AuditLog {
 public:
  AuditLog() = default;
  explicit AuditLog(const std::string& path);

  void append(AuditEntry entry);
  std::vector<AuditEntry> entries() const;
  std::size_t size() const;

  static std::string to_json_line(const AuditEntry& entry);

 private:
  mutable std::mutex mu_;
  std::vector<AuditEntry> entries_;
  std::optional<std::ofstream> file_;
};

enum class AdminVerb {
  kAddUser,
  kBumpVersion,
  kGlobalBump,
  kSetCount,
  kIncrementCount,
  kRotateOuid,
  kShowUser,
};

// CLI/URL spelling: "add-user", "bump-version", ...
std::string_view to_string(AdminVerb v);
std::optional<AdminVerb> parse_admin_verb(std::string_view s);
bool is_mutating(AdminVerb v);

struct AdminCommand {
  AdminVerb verb = AdminVerb::kShowUser;
  // Username; ignored by global-bump.
  std::string target;
  // add-user
  std::string password;
  std::int64_t count = 0;  // add-user initial count, set-count value
  std::string totp_secret;
  bool group_member = false;
  std::map<std::string, std::string> attributes;

  // {"verb": "...", "target": "...", ...} as sent to POST /admin/<verb>.
  static AdminCommand from_json(AdminVerb verb, std::string_view body);
  std::string to_json() const;
};

// Outcome of a command. `old_value`/`new_value` are set for mutations of a
// single attribute; `affected` for global-bump; `user` for add-user and
// show-user (never includes the credential verifier or TOTP secret).
struct AdminResult {
  AdminVerb verb = AdminVerb::kShowUser;
  std::string target;
  std::optional<std::string> old_value;
  std::optional<std::string> new_value;
  std::optional<std::size_t> affected;
  std::optional<UserRecord> user;

  std::string to_json() const;
  static AdminResult from_json(std::string_view body);
  // "bump-version alice: 2 -> 3"
  std::string summary() const;
};

// Administrative operations: revocation by version bump, quota adjustment
// and provisioning. Every successful mutation appends one audit entry.
class Admin {
 public:
  Admin(UserDirectory& store, AuditLog& audit, const Clock& clock)
      : store_(store), audit_(audit), clock_(clock) {}

  UserRecord add_user(const NewUser& user);
  Change<std::uint64_t> bump_version(std::string_view username);
  std::size_t global_bump();
  Change<std::uint64_t> set_count(std::string_view username, std::int64_t value);
  Change<std::uint64_t> increment_count(std::string_view username);
  Change<std::string> rotate_ouid(std::string_view username);
  UserRecord show_user(std::string_view username);

  // Throws UnknownUserError / InvalidArgument like the typed calls.
  AdminResult execute(const AdminCommand& command);

 private:
  void record(std::string_view command, std::string_view target, std::string old_value,
              std::string new_value);

  UserDirectory& store_;
  AuditLog& audit_;
  const Clock& clock_;
};

}  // namespace tulip

#endif  // TULIP_ADMIN_H_
