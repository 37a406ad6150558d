#include "tulip/identity_store.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tulip/crypto.h"
#include "tulip/error.h"

namespace tulip {
namespace {

using nlohmann::json;

const std::set<std::string> kRecordFields = {
    "username",      "credential_verifier", "sso_jwt_ouid",
    "sso_jwt_version", "sso_jwt_count",     "totp_secret",
    "enrollment_group_member", "attributes"};

json record_to_json(const UserRecord& r) {
  return {{"username", r.username},
          {"credential_verifier", r.credential_verifier},
          {"sso_jwt_ouid", r.sso_jwt_ouid},
          {"sso_jwt_version", r.sso_jwt_version},
          {"sso_jwt_count", r.sso_jwt_count},
          {"totp_secret", r.totp_secret},
          {"enrollment_group_member", r.enrollment_group_member},
          {"attributes", r.attributes}};
}

UserRecord record_from_json(const json& j, std::size_t index) {
  const std::string where = "record " + std::to_string(index) + ": ";
  if (!j.is_object()) throw StoreError(where + "not an object");
  for (const auto& [key, _] : j.items()) {
    if (!kRecordFields.contains(key)) throw StoreError(where + "unknown field '" + key + "'");
  }
  for (const auto& key : kRecordFields) {
    if (!j.contains(key)) throw StoreError(where + "missing field '" + key + "'");
  }
  auto require = [&](bool ok, const char* field) {
    if (!ok) throw StoreError(where + "field '" + field + "' has the wrong type");
  };
  require(j["username"].is_string(), "username");
  require(j["credential_verifier"].is_string(), "credential_verifier");
  require(j["sso_jwt_ouid"].is_string(), "sso_jwt_ouid");
  require(j["sso_jwt_version"].is_number_unsigned(), "sso_jwt_version");
  require(j["sso_jwt_count"].is_number_unsigned(), "sso_jwt_count");
  require(j["totp_secret"].is_string(), "totp_secret");
  require(j["enrollment_group_member"].is_boolean(), "enrollment_group_member");
  require(j["attributes"].is_object(), "attributes");

  UserRecord r;
  r.username = j["username"].get<std::string>();
  r.credential_verifier = j["credential_verifier"].get<std::string>();
  r.sso_jwt_ouid = j["sso_jwt_ouid"].get<std::string>();
  r.sso_jwt_version = j["sso_jwt_version"].get<std::uint64_t>();
  r.sso_jwt_count = j["sso_jwt_count"].get<std::uint64_t>();
  r.totp_secret = j["totp_secret"].get<std::string>();
  r.enrollment_group_member = j["enrollment_group_member"].get<bool>();
  for (const auto& [key, value] : j["attributes"].items()) {
    require(value.is_string(), "attributes");
    r.attributes.emplace(key, value.get<std::string>());
  }
  return r;
}

UserRecord redacted(UserRecord r) {
  r.credential_verifier.clear();
  return r;
}

}  // namespace

std::string snapshot_to_json(const StoreSnapshot& snapshot) {
  json records = json::array();
  for (const auto& r : snapshot.records) records.push_back(record_to_json(r));
  json doc = {{"schema_version", snapshot.schema_version}, {"records", records}};
  return doc.dump(2) + "\n";
}

StoreSnapshot snapshot_from_json(std::string_view text) {
  auto doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw StoreError("store file is not valid JSON");
  if (!doc.is_object()) throw StoreError("store file: top level is not an object");
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw StoreError("store file: missing schema_version");
  }
  if (doc["schema_version"].get<int>() != kStoreSchemaVersion) {
    throw StoreError("store file: unsupported schema_version " +
                     std::to_string(doc["schema_version"].get<int>()));
  }
  if (!doc.contains("records") || !doc["records"].is_array()) {
    throw StoreError("store file: missing records array");
  }
  if (doc.size() != 2) throw StoreError("store file: unexpected top-level fields");
  StoreSnapshot snapshot;
  std::size_t index = 0;
  for (const auto& j : doc["records"]) snapshot.records.push_back(record_from_json(j, index++));
  return snapshot;
}

void persist(const StoreSnapshot& snapshot, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + tmp);
    out << snapshot_to_json(snapshot);
    out.flush();
    if (!out) throw StoreError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw StoreError("cannot replace " + path + ": " + ec.message());
}

StoreSnapshot load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StoreError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return snapshot_from_json(buf.str());
}

// MemoryDirectory

MemoryDirectory::MemoryDirectory(PasswordHashParams params)
    : params_(params), decoy_verifier_(hash_password(base64url_encode(random_bytes(24)), params)) {}

MemoryDirectory::MemoryDirectory(const StoreSnapshot& snapshot, PasswordHashParams params)
    : MemoryDirectory(params) {
  if (snapshot.schema_version != kStoreSchemaVersion) {
    throw StoreError("unsupported schema_version " + std::to_string(snapshot.schema_version));
  }
  for (const auto& r : snapshot.records) {
    if (r.username.empty()) throw StoreError("record with empty username");
    if (r.sso_jwt_ouid.empty()) throw StoreError("user '" + r.username + "' has empty ouid");
    if (by_username_.contains(r.username)) {
      throw StoreError("duplicate username '" + r.username + "'");
    }
    if (ouid_to_username_.contains(r.sso_jwt_ouid)) {
      throw StoreError("duplicate ouid for user '" + r.username + "'");
    }
    by_username_.emplace(r.username, r);
    ouid_to_username_.emplace(r.sso_jwt_ouid, r.username);
  }
}

UserRecord& MemoryDirectory::require(std::string_view username) {
  auto it = by_username_.find(username);
  if (it == by_username_.end()) throw UnknownUserError(std::string(username));
  return it->second;
}

std::string MemoryDirectory::fresh_ouid() const {
  std::string ouid;
  do {
    ouid = random_uuid();
  } while (ouid_to_username_.contains(ouid));
  return ouid;
}

std::optional<UserRecord> MemoryDirectory::find_by_username(std::string_view username) {
  std::shared_lock lock(mu_);
  auto it = by_username_.find(username);
  if (it == by_username_.end()) return std::nullopt;
  return redacted(it->second);
}

std::optional<UserRecord> MemoryDirectory::find_by_ouid(std::string_view ouid) {
  std::shared_lock lock(mu_);
  auto it = ouid_to_username_.find(std::string(ouid));
  if (it == ouid_to_username_.end()) return std::nullopt;
  return redacted(by_username_.find(it->second)->second);
}

bool MemoryDirectory::verify_credentials(std::string_view username, std::string_view password) {
  std::string verifier;
  bool known = false;
  {
    std::shared_lock lock(mu_);
    auto it = by_username_.find(username);
    if (it != by_username_.end()) {
      verifier = it->second.credential_verifier;
      known = true;
    }
  }
  // Same work either way; the decoy never matches.
  const bool match = check_password(password, known ? verifier : decoy_verifier_);
  return known && match;
}

ConsumeResult MemoryDirectory::try_consume_enrollment(std::string_view username) {
  std::unique_lock lock(mu_);
  UserRecord& r = require(username);
  if (r.sso_jwt_count == 0) return {ConsumeStatus::kExhausted, redacted(r)};
  --r.sso_jwt_count;
  return {ConsumeStatus::kConsumed, redacted(r)};
}

void MemoryDirectory::refund_enrollment(std::string_view username) {
  std::unique_lock lock(mu_);
  ++require(username).sso_jwt_count;
}

std::optional<std::uint64_t> MemoryDirectory::read_version(std::string_view ouid) {
  std::shared_lock lock(mu_);
  auto it = ouid_to_username_.find(std::string(ouid));
  if (it == ouid_to_username_.end()) return std::nullopt;
  return by_username_.find(it->second)->second.sso_jwt_version;
}

UserRecord MemoryDirectory::add_user(const NewUser& user) {
  if (user.username.empty()) throw InvalidArgument("username must not be empty");
  if (!user.totp_secret.empty() && !base32_decode(user.totp_secret)) {
    throw InvalidArgument("totp secret is not base32");
  }
  UserRecord r;
  r.username = user.username;
  r.credential_verifier = hash_password(user.password, params_);
  r.sso_jwt_version = 0;
  r.sso_jwt_count = user.initial_count;
  r.totp_secret = user.totp_secret;
  r.enrollment_group_member = user.enrollment_group_member;
  r.attributes = user.attributes;

  std::unique_lock lock(mu_);
  if (by_username_.contains(user.username)) {
    throw InvalidArgument("user '" + user.username + "' already exists");
  }
  r.sso_jwt_ouid = fresh_ouid();
  ouid_to_username_.emplace(r.sso_jwt_ouid, r.username);
  by_username_.emplace(r.username, r);
  return redacted(r);
}

Change<std::uint64_t> MemoryDirectory::bump_version(std::string_view username) {
  std::unique_lock lock(mu_);
  UserRecord& r = require(username);
  if (r.sso_jwt_version == std::numeric_limits<std::uint64_t>::max()) {
    throw InvalidArgument("version overflow");
  }
  const auto old = r.sso_jwt_version++;
  return {old, r.sso_jwt_version};
}

std::size_t MemoryDirectory::global_bump() {
  std::unique_lock lock(mu_);
  for (const auto& [_, r] : by_username_) {
    if (r.sso_jwt_version == std::numeric_limits<std::uint64_t>::max()) {
      throw InvalidArgument("version overflow for '" + r.username + "'");
    }
  }
  for (auto& [_, r] : by_username_) ++r.sso_jwt_version;
  return by_username_.size();
}

Change<std::uint64_t> MemoryDirectory::set_count(std::string_view username, std::int64_t value) {
  if (value < 0) throw InvalidArgument("count must be non-negative");
  std::unique_lock lock(mu_);
  UserRecord& r = require(username);
  const auto old = r.sso_jwt_count;
  r.sso_jwt_count = static_cast<std::uint64_t>(value);
  return {old, r.sso_jwt_count};
}

Change<std::uint64_t> MemoryDirectory::increment_count(std::string_view username) {
  std::unique_lock lock(mu_);
  UserRecord& r = require(username);
  if (r.sso_jwt_count == std::numeric_limits<std::uint64_t>::max()) {
    throw InvalidArgument("count overflow");
  }
  const auto old = r.sso_jwt_count++;
  return {old, r.sso_jwt_count};
}

Change<std::string> MemoryDirectory::rotate_ouid(std::string_view username) {
  std::unique_lock lock(mu_);
  UserRecord& r = require(username);
  std::string next = fresh_ouid();
  std::string old = r.sso_jwt_ouid;
  ouid_to_username_.erase(old);
  ouid_to_username_.emplace(next, r.username);
  r.sso_jwt_ouid = next;
  return {std::move(old), std::move(next)};
}

StoreSnapshot MemoryDirectory::snapshot() {
  std::shared_lock lock(mu_);
  StoreSnapshot s;
  s.records.reserve(by_username_.size());
  for (const auto& [_, r] : by_username_) s.records.push_back(r);
  return s;
}

std::size_t MemoryDirectory::size() const {
  std::shared_lock lock(mu_);
  return by_username_.size();
}

// CountingDirectory

std::uint64_t DirectoryCounters::total_accesses() const {
  return find_by_username + find_by_ouid + verify_credentials + try_consume_enrollment +
         refund_enrollment + read_version + mutations;
}

void DirectoryCounters::reset() {
  find_by_username = 0;
  find_by_ouid = 0;
  verify_credentials = 0;
  try_consume_enrollment = 0;
  refund_enrollment = 0;
  read_version = 0;
  mutations = 0;
  snapshots = 0;
}

std::optional<UserRecord> CountingDirectory::find_by_username(std::string_view username) {
  ++counters_.find_by_username;
  return inner_.find_by_username(username);
}

std::optional<UserRecord> CountingDirectory::find_by_ouid(std::string_view ouid) {
  ++counters_.find_by_ouid;
  return inner_.find_by_ouid(ouid);
}

bool CountingDirectory::verify_credentials(std::string_view username, std::string_view password) {
  ++counters_.verify_credentials;
  return inner_.verify_credentials(username, password);
}

ConsumeResult CountingDirectory::try_consume_enrollment(std::string_view username) {
  ++counters_.try_consume_enrollment;
  return inner_.try_consume_enrollment(username);
}

void CountingDirectory::refund_enrollment(std::string_view username) {
  ++counters_.refund_enrollment;
  inner_.refund_enrollment(username);
}

std::optional<std::uint64_t> CountingDirectory::read_version(std::string_view ouid) {
  ++counters_.read_version;
  return inner_.read_version(ouid);
}

UserRecord CountingDirectory::add_user(const NewUser& user) {
  ++counters_.mutations;
  return inner_.add_user(user);
}

Change<std::uint64_t> CountingDirectory::bump_version(std::string_view username) {
  ++counters_.mutations;
  return inner_.bump_version(username);
}

std::size_t CountingDirectory::global_bump() {
  ++counters_.mutations;
  return inner_.global_bump();
}

Change<std::uint64_t> CountingDirectory::set_count(std::string_view username, std::int64_t value) {
  ++counters_.mutations;
  return inner_.set_count(username, value);
}

Change<std::uint64_t> CountingDirectory::increment_count(std::string_view username) {
  ++counters_.mutations;
  return inner_.increment_count(username);
}

Change<std::string> CountingDirectory::rotate_ouid(std::string_view username) {
  ++counters_.mutations;
  return inner_.rotate_ouid(username);
}

StoreSnapshot CountingDirectory::snapshot() {
  ++counters_.snapshots;
  return inner_.snapshot();
}

}  // namespace tulip
