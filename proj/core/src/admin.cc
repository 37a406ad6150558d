#include "tulip/admin.h"

#include "json.hpp"
#include "tulip/error.h"

namespace tulip {
namespace {

using nlohmann::json;

json public_user_json(const UserRecord& r) {
  return {{"username", r.username},
          {"sso_jwt_ouid", r.sso_jwt_ouid},
          {"sso_jwt_version", r.sso_jwt_version},
          {"sso_jwt_count", r.sso_jwt_count},
          {"has_totp", !r.totp_secret.empty()},
          {"enrollment_group_member", r.enrollment_group_member},
          {"attributes", r.attributes}};
}

UserRecord public_view(UserRecord r) {
  r.credential_verifier.clear();
  r.totp_secret.clear();
  return r;
}

}  // namespace

AuditLog::AuditLog(const std::string& path) {
  file_.emplace(path, std::ios::app);
  if (!*file_) throw StoreError("cannot open audit log " + path);
}

void AuditLog::append(AuditEntry entry) {
  std::lock_guard lock(mu_);
  if (file_) {
    *file_ << to_json_line(entry) << '\n';
    file_->flush();
  }
  entries_.push_back(std::move(entry));
}

std::vector<AuditEntry> AuditLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

std::size_t AuditLog::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::string AuditLog::to_json_line(const AuditEntry& e) {
  return json{{"timestamp", e.timestamp},
              {"command", e.command},
              {"target", e.target},
              {"old", e.old_value},
              {"new", e.new_value}}
      .dump();
}

std::string_view to_string(AdminVerb v) {
  switch (v) {
    case AdminVerb::kAddUser: return "add-user";
    case AdminVerb::kBumpVersion: return "bump-version";
    case AdminVerb::kGlobalBump: return "global-bump";
    case AdminVerb::kSetCount: return "set-count";
    case AdminVerb::kIncrementCount: return "increment-count";
    case AdminVerb::kRotateOuid: return "rotate-ouid";
    case AdminVerb::kShowUser: return "show-user";
  }
  return "unknown";
}

std::optional<AdminVerb> parse_admin_verb(std::string_view s) {
  for (auto v : {AdminVerb::kAddUser, AdminVerb::kBumpVersion, AdminVerb::kGlobalBump,
                 AdminVerb::kSetCount, AdminVerb::kIncrementCount, AdminVerb::kRotateOuid,
                 AdminVerb::kShowUser}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

bool is_mutating(AdminVerb v) { return v != AdminVerb::kShowUser; }

AdminCommand AdminCommand::from_json(AdminVerb verb, std::string_view body) {
  AdminCommand cmd;
  cmd.verb = verb;
  if (body.empty()) return cmd;
  auto doc = json::parse(body.begin(), body.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw InvalidArgument("admin body must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "target" && value.is_string()) {
      cmd.target = value.get<std::string>();
    } else if (key == "password" && value.is_string()) {
      cmd.password = value.get<std::string>();
    } else if (key == "count" && value.is_number_integer()) {
      cmd.count = value.get<std::int64_t>();
    } else if (key == "totp_secret" && value.is_string()) {
      cmd.totp_secret = value.get<std::string>();
    } else if (key == "group_member" && value.is_boolean()) {
      cmd.group_member = value.get<bool>();
    } else if (key == "attributes" && value.is_object()) {
      for (const auto& [k, v] : value.items()) {
        if (!v.is_string()) throw InvalidArgument("attribute values must be strings");
        cmd.attributes[k] = v.get<std::string>();
      }
    } else {
      throw InvalidArgument("unexpected admin field '" + key + "'");
    }
  }
  return cmd;
}

std::string AdminCommand::to_json() const {
  json doc = {{"target", target}};
  if (verb == AdminVerb::kAddUser) {
    doc["password"] = password;
    doc["count"] = count;
    doc["totp_secret"] = totp_secret;
    doc["group_member"] = group_member;
    doc["attributes"] = attributes;
  } else if (verb == AdminVerb::kSetCount) {
    doc["count"] = count;
  }
  return doc.dump();
}

std::string AdminResult::to_json() const {
  json doc = {{"verb", std::string(to_string(verb))}, {"target", target}};
  if (old_value) doc["old"] = *old_value;
  if (new_value) doc["new"] = *new_value;
  if (affected) doc["affected"] = *affected;
  if (user) doc["user"] = public_user_json(*user);
  return doc.dump();
}

AdminResult AdminResult::from_json(std::string_view body) {
  auto doc = json::parse(body.begin(), body.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw InvalidArgument("admin response is not JSON");
  AdminResult r;
  auto verb = parse_admin_verb(doc.value("verb", ""));
  if (!verb) throw InvalidArgument("admin response has unknown verb");
  r.verb = *verb;
  r.target = doc.value("target", "");
  if (doc.contains("old")) r.old_value = doc["old"].get<std::string>();
  if (doc.contains("new")) r.new_value = doc["new"].get<std::string>();
  if (doc.contains("affected")) r.affected = doc["affected"].get<std::size_t>();
  if (doc.contains("user")) {
    const auto& u = doc["user"];
    UserRecord rec;
    rec.username = u.value("username", "");
    rec.sso_jwt_ouid = u.value("sso_jwt_ouid", "");
    rec.sso_jwt_version = u.value("sso_jwt_version", std::uint64_t{0});
    rec.sso_jwt_count = u.value("sso_jwt_count", std::uint64_t{0});
    rec.enrollment_group_member = u.value("enrollment_group_member", false);
    if (u.contains("attributes")) {
      rec.attributes = u["attributes"].get<std::map<std::string, std::string>>();
    }
    r.user = rec;
  }
  return r;
}

std::string AdminResult::summary() const {
  std::string out(to_string(verb));
  if (!target.empty()) out += " " + target;
  if (old_value && new_value) out += ": " + *old_value + " -> " + *new_value;
  if (affected) out += ": " + std::to_string(*affected) + " users affected";
  if (user) {
    out += "\n  ouid:          " + user->sso_jwt_ouid;
    out += "\n  version:       " + std::to_string(user->sso_jwt_version);
    out += "\n  count:         " + std::to_string(user->sso_jwt_count);
    out += "\n  group member:  " + std::string(user->enrollment_group_member ? "yes" : "no");
    for (const auto& [k, v] : user->attributes) out += "\n  attr " + k + ": " + v;
  }
  return out;
}

void Admin::record(std::string_view command, std::string_view target, std::string old_value,
                   std::string new_value) {
  audit_.append({clock_.now(), std::string(command), std::string(target), std::move(old_value),
                 std::move(new_value)});
}

UserRecord Admin::add_user(const NewUser& user) {
  UserRecord r = store_.add_user(user);
  record("add-user", user.username, "", "ouid=" + r.sso_jwt_ouid + " version=0 count=" +
                                            std::to_string(r.sso_jwt_count));
  return public_view(std::move(r));
}

Change<std::uint64_t> Admin::bump_version(std::string_view username) {
  auto c = store_.bump_version(username);
  record("bump-version", username, std::to_string(c.old_value), std::to_string(c.new_value));
  return c;
}

std::size_t Admin::global_bump() {
  const std::size_t affected = store_.global_bump();
  record("global-bump", "ALL", "", "affected=" + std::to_string(affected));
  return affected;
}

Change<std::uint64_t> Admin::set_count(std::string_view username, std::int64_t value) {
  auto c = store_.set_count(username, value);
  record("set-count", username, std::to_string(c.old_value), std::to_string(c.new_value));
  return c;
}

Change<std::uint64_t> Admin::increment_count(std::string_view username) {
  auto c = store_.increment_count(username);
  record("increment-count", username, std::to_string(c.old_value), std::to_string(c.new_value));
  return c;
}

Change<std::string> Admin::rotate_ouid(std::string_view username) {
  auto c = store_.rotate_ouid(username);
  record("rotate-ouid", username, c.old_value, c.new_value);
  return c;
}

UserRecord Admin::show_user(std::string_view username) {
  auto r = store_.find_by_username(username);
  if (!r) throw UnknownUserError(std::string(username));
  return public_view(std::move(*r));
}

AdminResult Admin::execute(const AdminCommand& command) {
  AdminResult result;
  result.verb = command.verb;
  result.target = command.verb == AdminVerb::kGlobalBump ? "ALL" : command.target;
  switch (command.verb) {
    case AdminVerb::kAddUser: {
      if (command.count < 0) throw InvalidArgument("initial count must be non-negative");
      NewUser u{command.target, command.password, static_cast<std::uint64_t>(command.count),
                command.totp_secret, command.group_member, command.attributes};
      result.user = add_user(u);
      break;
    }
    case AdminVerb::kBumpVersion: {
      auto c = bump_version(command.target);
      result.old_value = std::to_string(c.old_value);
      result.new_value = std::to_string(c.new_value);
      break;
    }
    case AdminVerb::kGlobalBump:
      result.affected = global_bump();
      break;
    case AdminVerb::kSetCount: {
      auto c = set_count(command.target, command.count);
      result.old_value = std::to_string(c.old_value);
      result.new_value = std::to_string(c.new_value);
      break;
    }
    case AdminVerb::kIncrementCount: {
      auto c = increment_count(command.target);
      result.old_value = std::to_string(c.old_value);
      result.new_value = std::to_string(c.new_value);
      break;
    }
    case AdminVerb::kRotateOuid: {
      auto c = rotate_ouid(command.target);
      result.old_value = c.old_value;
      result.new_value = c.new_value;
      break;
    }
    case AdminVerb::kShowUser:
      result.user = show_user(command.target);
      break;
  }
  return result;
}

}  // namespace tulip
