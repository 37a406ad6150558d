#include "tulip/totp.h"

#include <algorithm>
#include <array>

#include "tulip/crypto.h"
#include "tulip/encoding.h"

namespace tulip {

std::string hotp_code(std::span<const std::uint8_t> key, std::uint64_t counter, int digits) {
  std::array<std::uint8_t, 8> message{};
  for (int i = 7; i >= 0; --i) {
    message[i] = static_cast<std::uint8_t>(counter & 0xff);
    counter >>= 8;
  }
  const Sha1Mac mac = hmac_sha1(key, message);
  // Dynamic truncation.
  const int offset = mac[19] & 0x0f;
  const std::uint32_t binary = (static_cast<std::uint32_t>(mac[offset] & 0x7f) << 24) |
                               (static_cast<std::uint32_t>(mac[offset + 1]) << 16) |
                               (static_cast<std::uint32_t>(mac[offset + 2]) << 8) |
                               static_cast<std::uint32_t>(mac[offset + 3]);
  std::uint32_t modulus = 1;
  for (int i = 0; i < digits; ++i) modulus *= 10;
  std::string code = std::to_string(binary % modulus);
  if (static_cast<int>(code.size()) < digits) code.insert(0, digits - code.size(), '0');
  return code;
}

std::string totp_code(std::span<const std::uint8_t> key, UnixTime now, const TotpParams& params) {
  return hotp_code(key, static_cast<std::uint64_t>(now / params.step_seconds), params.digits);
}

bool verify_totp(std::string_view base32_secret, std::string_view code, UnixTime now,
                 const TotpParams& params) {
  if (base32_secret.empty() || now < 0) return false;
  auto key = base32_decode(base32_secret);
  if (!key || key->empty()) return false;
  if (static_cast<int>(code.size()) != params.digits ||
      !std::all_of(code.begin(), code.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return false;
  }
  const std::int64_t current = now / params.step_seconds;
  bool matched = false;
  // Check every window so timing does not reveal which one matched.
  for (std::int64_t step = current - params.skew_steps; step <= current + params.skew_steps;
       ++step) {
    if (step < 0) continue;
    const std::string expected = hotp_code(*key, static_cast<std::uint64_t>(step), params.digits);
    matched |= constant_time_equal(expected, code);
  }
  return matched;
}

}  // namespace tulip
