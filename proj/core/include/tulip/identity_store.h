#ifndef TULIP_IDENTITY_STORE_H_
#define TULIP_IDENTITY_STORE_H_

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tulip/password.h"

namespace tulip {

// A user's entry in the backing identity store, holding the three token
// attributes (ouid, version, remaining enrollment count).
struct UserRecord {
  std::string username;
  // Salted scrypt verifier. Lookups return records with this field cleared.
  std::string credential_verifier;
  std::string sso_jwt_ouid;
  std::uint64_t sso_jwt_version = 0;
  // Remaining enrollments. Never negative.
  std::uint64_t sso_jwt_count = 0;
  // Base32 TOTP shared secret; empty when the user has none.
  std::string totp_secret;
  bool enrollment_group_member = false;
  // Secondary facts checked by static_attribute challenges (employee id, ...).
  std::map<std::string, std::string> attributes;

  bool operator==(const UserRecord&) const = default;
};

inline constexpr int kStoreSchemaVersion = 1;

struct StoreSnapshot {
  std::vector<UserRecord> records;
  int schema_version = kStoreSchemaVersion;

  bool operator==(const StoreSnapshot&) const = default;
};

// Persistence format: a UTF-8 JSON document
//   {"schema_version": 1, "records": [{<UserRecord fields>}, ...]}
// Field names match UserRecord. Writes go to a temporary file that is then
// renamed over the target.
std::string snapshot_to_json(const StoreSnapshot& snapshot);
StoreSnapshot snapshot_from_json(std::string_view text);
void persist(const StoreSnapshot& snapshot, const std::string& path);
StoreSnapshot load(const std::string& path);

template <typename T>
struct Change {
  T old_value;
  T new_value;
};

struct NewUser {
  std::string username;
  std::string password;
  std::uint64_t initial_count = 0;
  std::string totp_secret;
  bool enrollment_group_member = false;
  std::map<std::string, std::string> attributes;
};

enum class ConsumeStatus { kConsumed, kExhausted };

struct ConsumeResult {
  ConsumeStatus status;
  // State of the record immediately after the operation.
  UserRecord record;
};

// Store interface. LDAP or directory adapters would implement the same
// surface; the reference backend is MemoryDirectory.
class UserDirectory {
 public:
  virtual ~UserDirectory() = default;

  virtual std::optional<UserRecord> find_by_username(std::string_view username) = 0;
  // Record and every token attribute in one access.
  virtual std::optional<UserRecord> find_by_ouid(std::string_view ouid) = 0;
  // Unknown user and wrong password are indistinguishable: both run one
  // full hash and return false.
  virtual bool verify_credentials(std::string_view username, std::string_view password) = 0;
  // Atomic: decrements and returns kConsumed when count > 0, else kExhausted
  // with no change. Throws UnknownUserError.
  virtual ConsumeResult try_consume_enrollment(std::string_view username) = 0;
  // Compensates a consume whose token could not be minted.
  virtual void refund_enrollment(std::string_view username) = 0;
  virtual std::optional<std::uint64_t> read_version(std::string_view ouid) = 0;

  virtual UserRecord add_user(const NewUser& user) = 0;
  virtual Change<std::uint64_t> bump_version(std::string_view username) = 0;
  virtual std::size_t global_bump() = 0;
  virtual Change<std::uint64_t> set_count(std::string_view username, std::int64_t value) = 0;
  virtual Change<std::uint64_t> increment_count(std::string_view username) = 0;
  virtual Change<std::string> rotate_ouid(std::string_view username) = 0;

  virtual StoreSnapshot snapshot() = 0;
};

class MemoryDirectory final : public UserDirectory {
 public:
  explicit MemoryDirectory(PasswordHashParams params = {});
  // Throws StoreError on duplicate usernames or ouids, or on schema mismatch.
  MemoryDirectory(const StoreSnapshot& snapshot, PasswordHashParams params = {});

  std::optional<UserRecord> find_by_username(std::string_view username) override;
  std::optional<UserRecord> find_by_ouid(std::string_view ouid) override;
  bool verify_credentials(std::string_view username, std::string_view password) override;
  ConsumeResult try_consume_enrollment(std::string_view username) override;
  void refund_enrollment(std::string_view username) override;
  std::optional<std::uint64_t> read_version(std::string_view ouid) override;

  UserRecord add_user(const NewUser& user) override;
  Change<std::uint64_t> bump_version(std::string_view username) override;
  std::size_t global_bump() override;
  Change<std::uint64_t> set_count(std::string_view username, std::int64_t value) override;
  Change<std::uint64_t> increment_count(std::string_view username) override;
  Change<std::string> rotate_ouid(std::string_view username) override;

  StoreSnapshot snapshot() override;

  std::size_t size() const;

 private:
  UserRecord& require(std::string_view username);
  std::string fresh_ouid() const;

  PasswordHashParams params_;
  // Verifier for a password nobody knows, so unknown users cost one hash.
  std::string decoy_verifier_;
  mutable std::shared_mutex mu_;
  std::map<std::string, UserRecord, std::less<>> by_username_;
  std::unordered_map<std::string, std::string> ouid_to_username_;
};

// Per-operation call counters.
struct DirectoryCounters {
  std::atomic<std::uint64_t> find_by_username{0};
  std::atomic<std::uint64_t> find_by_ouid{0};
  std::atomic<std::uint64_t> verify_credentials{0};
  std::atomic<std::uint64_t> try_consume_enrollment{0};
  std::atomic<std::uint64_t> refund_enrollment{0};
  std::atomic<std::uint64_t> read_version{0};
  std::atomic<std::uint64_t> mutations{0};
  std::atomic<std::uint64_t> snapshots{0};

  // Every call except snapshots.
  std::uint64_t total_accesses() const;
  void reset();
};

// Decorator that counts calls before forwarding them; used to assert how
// many back-end accesses each code path makes.
class CountingDirectory final : public UserDirectory {
 public:
  explicit CountingDirectory(UserDirectory& inner) : inner_(inner) {}

  const DirectoryCounters& counters() const { return counters_; }
  void reset_counters() { counters_.reset(); }

  std::optional<UserRecord> find_by_username(std::string_view username) override;
  std::optional<UserRecord> find_by_ouid(std::string_view ouid) override;
  bool verify_credentials(std::string_view username, std::string_view password) override;
  ConsumeResult try_consume_enrollment(std::string_view username) override;
  void refund_enrollment(std::string_view username) override;
  std::optional<std::uint64_t> read_version(std::string_view ouid) override;

  UserRecord add_user(const NewUser& user) override;
  Change<std::uint64_t> bump_version(std::string_view username) override;
  std::size_t global_bump() override;
  Change<std::uint64_t> set_count(std::string_view username, std::int64_t value) override;
  Change<std::uint64_t> increment_count(std::string_view username) override;
  Change<std::string> rotate_ouid(std::string_view username) override;

  StoreSnapshot snapshot() override;

 private:
  UserDirectory& inner_;
  DirectoryCounters counters_;
};

}  // namespace tulip

#endif  // TULIP_IDENTITY_STORE_H_
