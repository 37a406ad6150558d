#ifndef TULIP_ENROLLMENT_H_
#define TULIP_ENROLLMENT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tulip/cidr.h"
#include "tulip/clock.h"
#include "tulip/identity_store.h"
#include "tulip/keyring.h"
#include "tulip/token.h"
#include "tulip/totp.h"

namespace tulip {

// States of the enrollment procedure. The labels used in traces follow the
// protocol's state names: request q_r, token check q_tau, enrollment
// q_epsilon, quota q_c, accepted q_alpha, declined q_delta.
enum class EnrollState { kRequest, kTokenCheck, kEnrollment, kQuota, kAccepted, kDeclined };

std::string_view label(EnrollState s);

struct EnrollmentRequest {
  std::optional<std::string> presented_token;
  std::string username;
  std::string password;
  // challenge id -> response (employee id, TOTP code, ...)
  std::map<std::string, std::string> challenge_responses;
  std::string client_address;
};

enum class DeclineReason { kBadCredentials, kChallengeFailed, kQuotaExhausted, kInternalError };

std::string_view to_string(DeclineReason r);

struct EnrollmentOutcome {
  bool accepted = false;
  // Accepted only. Empty when reused.
  std::string token;
  // Accepted because a fully valid token was already presented.
  bool reused = false;
  // Declined only.
  std::optional<DeclineReason> reason;
  std::vector<EnrollState> trace;
  // The user's ouid whenever it became known (valid token or successful
  // credential check); used for server-side logging only.
  std::string ouid;
};

enum class ChallengeKind { kNetworkAllowlist, kGroupMembership, kStaticAttribute, kTotp };

std::string_view to_string(ChallengeKind k);
std::optional<ChallengeKind> parse_challenge_kind(std::string_view s);

struct ChallengeDefinition {
  std::string id;
  ChallengeKind kind = ChallengeKind::kGroupMembership;
  // kNetworkAllowlist
  CidrList networks;
  // kStaticAttribute: name of the user attribute the response must equal.
  std::string attribute;
  // kTotp
  TotpParams totp;
};

// Ordered, fail-closed list of extra enrollment checks.
struct ChallengePolicy {
  std::vector<ChallengeDefinition> challenges;

  // JSON array of {"id": ..., "kind": "network_allowlist"|"group_membership"|
  // "static_attribute"|"totp", plus "cidrs": [...] or "attribute": "..."}.
  // Unknown keys are rejected with ConfigError.
  static ChallengePolicy from_json(std::string_view text);
  std::string to_json() const;

  // Ids of the challenges that expect a response field from the client.
  std::vector<std::string> response_fields() const;
};

struct EnrollmentSettings {
  std::int64_t token_lifetime = kDefaultTokenLifetime;
};

// One challenge against the already-resolved user record. A missing
// response fails.
bool evaluate_challenge(const ChallengeDefinition& definition, const EnrollmentRequest& request,
                        const UserRecord& user, UnixTime now);

// Runs the enrollment procedure:
//   q_r   -> q_tau when a token is presented; a fully valid token
//            (signature, expiry and current version) ends at q_alpha with
//            reused=true and no mutation. Anything else is discarded.
//   q_eps -> credentials, then every challenge in policy order (all are
//            evaluated even after a failure).
//   q_c   -> atomic quota consume; on success mint and end at q_alpha.
// If minting fails after a consume, the consume is refunded. Store faults
// end in Declined(kInternalError).
EnrollmentOutcome enroll(const EnrollmentRequest& request, UserDirectory& store,
                         const SigningKeyring& keyring, const ChallengePolicy& policy,
                         UnixTime now, const EnrollmentSettings& settings = {});

}  // namespace tulip

#endif  // TULIP_ENROLLMENT_H_
