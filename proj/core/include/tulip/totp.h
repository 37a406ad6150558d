#ifndef TULIP_TOTP_H_
#define TULIP_TOTP_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "tulip/clock.h"

namespace tulip {

// RFC 6238 time-based one-time codes: HMAC-SHA1, 30-second steps, 6 digits.
struct TotpParams {
  std::int64_t step_seconds = 30;
  int digits = 6;
  // Accepted drift in whole steps on either side of the current one.
  int skew_steps = 1;
};

// RFC 4226 HOTP value for `counter`, zero-padded to `digits`.
std::string hotp_code(std::span<const std::uint8_t> key, std::uint64_t counter, int digits);

std::string totp_code(std::span<const std::uint8_t> key, UnixTime now, const TotpParams& params = {});

// `base32_secret` as stored on the user record. Returns false for an
// undecodable secret, a code of the wrong length or non-digit input.
bool verify_totp(std::string_view base32_secret, std::string_view code, UnixTime now,
                 const TotpParams& params = {});

}  // namespace tulip

#endif  // TULIP_TOTP_H_
