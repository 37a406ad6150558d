#include "tulip/enrollment.h"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "tulip/crypto.h"
#include "tulip/error.h"

namespace tulip {
namespace {

using nlohmann::json;

EnrollmentOutcome& decline(EnrollmentOutcome& out, DeclineReason reason) {
  out.accepted = false;
  out.reason = reason;
  out.token.clear();
  out.trace.push_back(EnrollState::kDeclined);
  return out;
}

// True only for a token that would pass the login gate right now.
bool token_fully_valid(const std::string& token, UserDirectory& store,
                       const SigningKeyring& keyring, UnixTime now, std::string& ouid) {
  const VerifyResult verified = verify_token(token, now, keyring);
  if (!verified) return false;
  const auto version = store.read_version(verified.claims().ouid);
  if (!version || *version != verified.claims().version) return false;
  ouid = verified.claims().ouid;
  return true;
}

}  // namespace

std::string_view label(EnrollState s) {
  switch (s) {
    case EnrollState::kRequest: return "q_r";
    case EnrollState::kTokenCheck: return "q_tau";
    case EnrollState::kEnrollment: return "q_epsilon";
    case EnrollState::kQuota: return "q_c";
    case EnrollState::kAccepted: return "q_alpha";
    case EnrollState::kDeclined: return "q_delta";
  }
  return "?";
}

std::string_view to_string(DeclineReason r) {
  switch (r) {
    case DeclineReason::kBadCredentials: return "bad_credentials";
    case DeclineReason::kChallengeFailed: return "challenge_failed";
    case DeclineReason::kQuotaExhausted: return "quota_exhausted";
    case DeclineReason::kInternalError: return "internal_error";
  }
  return "unknown";
}

std::string_view to_string(ChallengeKind k) {
  switch (k) {
    case ChallengeKind::kNetworkAllowlist: return "network_allowlist";
    case ChallengeKind::kGroupMembership: return "group_membership";
    case ChallengeKind::kStaticAttribute: return "static_attribute";
    case ChallengeKind::kTotp: return "totp";
  }
  return "unknown";
}

std::optional<ChallengeKind> parse_challenge_kind(std::string_view s) {
  if (s == "network_allowlist") return ChallengeKind::kNetworkAllowlist;
  if (s == "group_membership") return ChallengeKind::kGroupMembership;
  if (s == "static_attribute") return ChallengeKind::kStaticAttribute;
  if (s == "totp") return ChallengeKind::kTotp;
  return std::nullopt;
}

ChallengePolicy ChallengePolicy::from_json(std::string_view text) {
  auto doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) {
    throw ConfigError("challenge policy must be a JSON array");
  }
  ChallengePolicy policy;
  std::set<std::string> seen;
  for (const auto& entry : doc) {
    if (!entry.is_object()) throw ConfigError("challenge entry must be an object");
    if (!entry.contains("id") || !entry["id"].is_string() ||
        entry["id"].get<std::string>().empty()) {
      throw ConfigError("challenge entry needs a non-empty string 'id'");
    }
    ChallengeDefinition def;
    def.id = entry["id"].get<std::string>();
    if (!seen.insert(def.id).second) throw ConfigError("duplicate challenge id '" + def.id + "'");
    if (def.id == "username" || def.id == "password") {
      throw ConfigError("challenge id '" + def.id + "' is reserved");
    }
    if (!entry.contains("kind") || !entry["kind"].is_string()) {
      throw ConfigError("challenge '" + def.id + "' needs a string 'kind'");
    }
    auto kind = parse_challenge_kind(entry["kind"].get<std::string>());
    if (!kind) throw ConfigError("challenge '" + def.id + "' has unknown kind");
    def.kind = *kind;

    std::set<std::string> allowed = {"id", "kind"};
    switch (def.kind) {
      case ChallengeKind::kNetworkAllowlist: {
        allowed.insert("cidrs");
        if (!entry.contains("cidrs") || !entry["cidrs"].is_array()) {
          throw ConfigError("challenge '" + def.id + "' needs a 'cidrs' array");
        }
        std::vector<std::string> cidrs;
        for (const auto& c : entry["cidrs"]) {
          if (!c.is_string()) throw ConfigError("challenge '" + def.id + "': cidr not a string");
          cidrs.push_back(c.get<std::string>());
        }
        def.networks = CidrList::parse(cidrs);
        break;
      }
      case ChallengeKind::kStaticAttribute:
        allowed.insert("attribute");
        if (!entry.contains("attribute") || !entry["attribute"].is_string()) {
          throw ConfigError("challenge '" + def.id + "' needs a string 'attribute'");
        }
        def.attribute = entry["attribute"].get<std::string>();
        break;
      case ChallengeKind::kTotp:
        allowed.insert("skew_steps");
        if (entry.contains("skew_steps")) {
          if (!entry["skew_steps"].is_number_unsigned() || entry["skew_steps"].get<int>() > 10) {
            throw ConfigError("challenge '" + def.id + "': skew_steps must be in [0, 10]");
          }
          def.totp.skew_steps = entry["skew_steps"].get<int>();
        }
        break;
      case ChallengeKind::kGroupMembership:
        break;
    }
    for (const auto& [key, _] : entry.items()) {
      if (!allowed.contains(key)) {
        throw ConfigError("challenge '" + def.id + "': unknown key '" + key + "'");
      }
    }
    policy.challenges.push_back(std::move(def));
  }
  return policy;
}

std::string ChallengePolicy::to_json() const {
  json doc = json::array();
  for (const auto& c : challenges) {
    json entry = {{"id", c.id}, {"kind", std::string(to_string(c.kind))}};
    if (c.kind == ChallengeKind::kNetworkAllowlist) {
      json cidrs = json::array();
      for (const auto& b : c.networks.blocks()) cidrs.push_back(b.to_string());
      entry["cidrs"] = cidrs;
    } else if (c.kind == ChallengeKind::kStaticAttribute) {
      entry["attribute"] = c.attribute;
    } else if (c.kind == ChallengeKind::kTotp) {
      entry["skew_steps"] = c.totp.skew_steps;
    }
    doc.push_back(entry);
  }
  return doc.dump();
}

std::vector<std::string> ChallengePolicy::response_fields() const {
  std::vector<std::string> fields;
  for (const auto& c : challenges) {
    if (c.kind == ChallengeKind::kStaticAttribute || c.kind == ChallengeKind::kTotp) {
      fields.push_back(c.id);
    }
  }
  return fields;
}

bool evaluate_challenge(const ChallengeDefinition& definition, const EnrollmentRequest& request,
                        const UserRecord& user, UnixTime now) {
  switch (definition.kind) {
    case ChallengeKind::kNetworkAllowlist:
      return definition.networks.contains(request.client_address);
    case ChallengeKind::kGroupMembership:
      return user.enrollment_group_member;
    case ChallengeKind::kStaticAttribute: {
      auto response = request.challenge_responses.find(definition.id);
      auto stored = user.attributes.find(definition.attribute);
      if (response == request.challenge_responses.end() || stored == user.attributes.end() ||
          stored->second.empty()) {
        return false;
      }
      return constant_time_equal(response->second, stored->second);
    }
    case ChallengeKind::kTotp: {
      auto response = request.challenge_responses.find(definition.id);
      if (response == request.challenge_responses.end()) return false;
      return verify_totp(user.totp_secret, response->second, now, definition.totp);
    }
  }
  return false;
}

EnrollmentOutcome enroll(const EnrollmentRequest& request, UserDirectory& store,
                         const SigningKeyring& keyring, const ChallengePolicy& policy,
                         UnixTime now, const EnrollmentSettings& settings) {
  EnrollmentOutcome out;
  out.trace.push_back(EnrollState::kRequest);
  try {
    if (request.presented_token) {
      out.trace.push_back(EnrollState::kTokenCheck);
      if (token_fully_valid(*request.presented_token, store, keyring, now, out.ouid)) {
        out.accepted = true;
        out.reused = true;
        out.trace.push_back(EnrollState::kAccepted);
        return out;
      }
      // Invalid or revoked: discard and enroll afresh.
    }

    out.trace.push_back(EnrollState::kEnrollment);
    if (!store.verify_credentials(request.username, request.password)) {
      return decline(out, DeclineReason::kBadCredentials);
    }
    auto user = store.find_by_username(request.username);
    if (!user) return decline(out, DeclineReason::kInternalError);
    out.ouid = user->sso_jwt_ouid;

    bool challenges_pass = true;
    for (const auto& [id, _] : request.challenge_responses) {
      const bool known = std::any_of(policy.challenges.begin(), policy.challenges.end(),
                                     [&](const ChallengeDefinition& c) { return c.id == id; });
      challenges_pass &= known;
    }
    for (const auto& challenge : policy.challenges) {
      // No short-circuit: every challenge runs.
      const bool passed = evaluate_challenge(challenge, request, *user, now);
      challenges_pass = challenges_pass && passed;
    }
    if (!challenges_pass) return decline(out, DeclineReason::kChallengeFailed);

    out.trace.push_back(EnrollState::kQuota);
    const ConsumeResult consumed = store.try_consume_enrollment(request.username);
    if (consumed.status == ConsumeStatus::kExhausted) {
      return decline(out, DeclineReason::kQuotaExhausted);
    }
    try {
      out.token = mint_token(consumed.record, now, settings.token_lifetime, keyring);
    } catch (const std::exception&) {
      store.refund_enrollment(request.username);
      return decline(out, DeclineReason::kInternalError);
    }
    out.ouid = consumed.record.sso_jwt_ouid;
    out.accepted = true;
    out.trace.push_back(EnrollState::kAccepted);
    return out;
  } catch (const std::exception&) {
    return decline(out, DeclineReason::kInternalError);
  }
}

}  // namespace tulip
