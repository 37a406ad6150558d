#ifndef TULIP_LOGIN_GATE_H_
#define TULIP_LOGIN_GATE_H_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tulip/clock.h"
#include "tulip/identity_store.h"
#include "tulip/keyring.h"

namespace tulip {

enum class GateVerdict { kServe, kReject };

enum class GateReason { kNoToken, kBadSignature, kExpired, kUnknownOuid, kVersionMismatch };

// Trace states: request q_r, validating q_upsilon, accepted q_alpha,
// declined q_delta.
enum class GateState { kRequest, kValidating, kAccepted, kDeclined };

std::string_view to_string(GateReason r);
std::string_view label(GateState s);

struct GateDecision {
  GateVerdict verdict = GateVerdict::kReject;
  std::optional<GateReason> reason;
  std::vector<GateState> trace;
  // Set once the token's signature has been checked.
  std::string ouid;

  bool serve() const { return verdict == GateVerdict::kServe; }
};

// Decides whether the login page may be shown:
//   1. no token             -> Reject(NoToken), no store access
//   2. signature or expiry  -> Reject(BadSignature|Expired), no store access
//   3. read_version(ouid)   -> Reject(UnknownOuid|VersionMismatch) or Serve
// Exactly one store access happens, and only when 1 and 2 pass. A store
// fault rejects.
GateDecision gate(const std::optional<std::string>& presented_token, UserDirectory& store,
                  const SigningKeyring& keyring, UnixTime now);

struct Credentials {
  std::string username;
  std::string password;
};

struct LoginAttempt {
  std::string username;
  std::string password;
  std::optional<std::string> presented_token;
};

struct SessionGrant {
  std::string session_id;
  std::string username;
};

// Second-factor hook invoked after a successful password check. The
// reference service has no real MFA; the harness installs a simulated one.
class MfaProvider {
 public:
  virtual ~MfaProvider() = default;
  virtual bool approve(const std::string& username) = 0;
};

enum class GateMode {
  kEnforce,
  // Gate disabled: the login form is public. Only for contrast runs.
  kBypass,
};

enum class LoginFailure { kGateRejected, kMalformedForm, kBadCredentials, kMfaDenied };

std::string_view to_string(LoginFailure f);

struct LoginResult {
  GateDecision gate;
  std::optional<SessionGrant> grant;
  std::optional<LoginFailure> failure;

  bool granted() const { return grant.has_value(); }
};

struct LoginOptions {
  GateMode mode = GateMode::kEnforce;
  MfaProvider* mfa = nullptr;
};

// Yields the submitted form fields, or nullopt when they are malformed.
// Called only after the gate serves.
using CredentialReader = std::function<std::optional<Credentials>()>;

// Gate first. On Reject the credential reader is never invoked, so the
// submitted username and password are never looked at, verified or
// forwarded to MFA.
LoginResult process_login(const std::optional<std::string>& presented_token,
                          const CredentialReader& read_credentials, UserDirectory& store,
                          const SigningKeyring& keyring, UnixTime now,
                          const LoginOptions& options = {});

LoginResult process_login(const LoginAttempt& attempt, UserDirectory& store,
                          const SigningKeyring& keyring, UnixTime now,
                          const LoginOptions& options = {});

}  // namespace tulip

#endif  // TULIP_LOGIN_GATE_H_
