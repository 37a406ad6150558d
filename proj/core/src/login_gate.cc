#include "tulip/login_gate.h"

#include "tulip/crypto.h"
#include "tulip/token.h"

namespace tulip {
namespace {

GateDecision reject(GateDecision d, GateReason reason) {
  d.verdict = GateVerdict::kReject;
  d.reason = reason;
  d.trace.push_back(GateState::kDeclined);
  return d;
}

LoginResult fail(LoginResult r, LoginFailure failure) {
  r.failure = failure;
  return r;
}

}  // namespace

std::string_view to_string(GateReason r) {
  switch (r) {
    case GateReason::kNoToken: return "no_token";
    case GateReason::kBadSignature: return "bad_signature";
    case GateReason::kExpired: return "expired";
    case GateReason::kUnknownOuid: return "unknown_ouid";
    case GateReason::kVersionMismatch: return "version_mismatch";
  }
  return "unknown";
}

std::string_view label(GateState s) {
  switch (s) {
    case GateState::kRequest: return "q_r";
    case GateState::kValidating: return "q_upsilon";
    case GateState::kAccepted: return "q_alpha";
    case GateState::kDeclined: return "q_delta";
  }
  return "?";
}

std::string_view to_string(LoginFailure f) {
  switch (f) {
    case LoginFailure::kGateRejected: return "gate_rejected";
    case LoginFailure::kMalformedForm: return "malformed_form";
    case LoginFailure::kBadCredentials: return "bad_credentials";
    case LoginFailure::kMfaDenied: return "mfa_denied";
  }
  return "unknown";
}

GateDecision gate(const std::optional<std::string>& presented_token, UserDirectory& store,
                  const SigningKeyring& keyring, UnixTime now) {
  GateDecision d;
  d.trace.push_back(GateState::kRequest);
  if (!presented_token || presented_token->empty()) return reject(std::move(d), GateReason::kNoToken);

  d.trace.push_back(GateState::kValidating);
  const VerifyResult verified = verify_token(*presented_token, now, keyring);
  if (!verified) {
    return reject(std::move(d), verified.failure() == VerifyFailure::kExpired
                                    ? GateReason::kExpired
                                    : GateReason::kBadSignature);
  }
  d.ouid = verified.claims().ouid;

  std::optional<std::uint64_t> version;
  try {
    version = store.read_version(verified.claims().ouid);
  } catch (const std::exception&) {
    return reject(std::move(d), GateReason::kUnknownOuid);
  }
  if (!version) return reject(std::move(d), GateReason::kUnknownOuid);
  if (*version != verified.claims().version) {
    return reject(std::move(d), GateReason::kVersionMismatch);
  }
  d.verdict = GateVerdict::kServe;
  d.trace.push_back(GateState::kAccepted);
  return d;
}

LoginResult process_login(const std::optional<std::string>& presented_token,
                          const CredentialReader& read_credentials, UserDirectory& store,
                          const SigningKeyring& keyring, UnixTime now,
                          const LoginOptions& options) {
  LoginResult result;
  if (options.mode == GateMode::kEnforce) {
    result.gate = gate(presented_token, store, keyring, now);
    if (!result.gate.serve()) return fail(std::move(result), LoginFailure::kGateRejected);
  } else {
    result.gate.verdict = GateVerdict::kServe;
    result.gate.trace = {GateState::kRequest, GateState::kAccepted};
  }

  const std::optional<Credentials> credentials = read_credentials();
  if (!credentials) return fail(std::move(result), LoginFailure::kMalformedForm);
  bool ok = false;
  try {
    ok = store.verify_credentials(credentials->username, credentials->password);
  } catch (const std::exception&) {
    ok = false;
  }
  if (!ok) return fail(std::move(result), LoginFailure::kBadCredentials);
  if (options.mfa != nullptr && !options.mfa->approve(credentials->username)) {
    return fail(std::move(result), LoginFailure::kMfaDenied);
  }
  result.grant = SessionGrant{hex_encode(random_bytes(16)), credentials->username};
  return result;
}

LoginResult process_login(const LoginAttempt& attempt, UserDirectory& store,
                          const SigningKeyring& keyring, UnixTime now,
                          const LoginOptions& options) {
  return process_login(
      attempt.presented_token,
      [&attempt]() -> std::optional<Credentials> {
        return Credentials{attempt.username, attempt.password};
      },
      store, keyring, now, options);
}

}  // namespace tulip
