#ifndef TULIP_TOKEN_H_
#define TULIP_TOKEN_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "tulip/clock.h"
#include "tulip/keyring.h"

namespace tulip {

struct UserRecord;

inline constexpr std::int64_t kDefaultTokenLifetime = 180LL * 24 * 60 * 60;

// Claims carried by an enrollment token. Nothing that identifies the user
// directly (username, email) is ever included; the ouid is resolved against
// the identity store instead.
struct EnrollmentToken {
  std::string ouid;
  std::uint64_t version = 0;
  UnixTime issued_at = 0;
  UnixTime expires_at = 0;
  std::string key_id;

  bool operator==(const EnrollmentToken&) const = default;
};

enum class VerifyFailure {
  kMalformed,
  kUnknownKey,
  kBadSignature,
  kExpired,
};

std::string_view to_string(VerifyFailure f);

class VerifyResult {
 public:
  VerifyResult(EnrollmentToken claims) : value_(std::move(claims)) {}  // NOLINT
  VerifyResult(VerifyFailure failure) : value_(failure) {}             // NOLINT

  bool ok() const { return std::holds_alternative<EnrollmentToken>(value_); }
  explicit operator bool() const { return ok(); }

  const EnrollmentToken& claims() const { return std::get<EnrollmentToken>(value_); }
  VerifyFailure failure() const { return std::get<VerifyFailure>(value_); }

 private:
  std::variant<EnrollmentToken, VerifyFailure> value_;
};

// Signs the user's current ouid and version with the keyring's active key.
// Output is base64url(header) "." base64url(claims) "." base64url(HMAC-SHA256)
// and is a pure function of its inputs.
//
// Throws ConfigError if the user has no ouid or lifetime <= 0, KeyError if
// the active key is unusable.
std::string mint_token(const UserRecord& user, UnixTime now, std::int64_t lifetime,
                       const SigningKeyring& keyring);

// Lower-level form used by mint_token; exposed for tests and tools.
std::string sign_token(const EnrollmentToken& claims, const SigningKeyring& keyring);

// Accepts arbitrary bytes. Succeeds only for a canonical three-segment token
// whose kid is in the keyring, whose MAC matches (constant-time compare) and
// for which now < exp. Never touches the identity store.
VerifyResult verify_token(std::string_view serialized, UnixTime now,
                          const SigningKeyring& keyring);

}  // namespace tulip

#endif  // TULIP_TOKEN_H_
