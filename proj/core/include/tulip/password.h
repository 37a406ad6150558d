#ifndef TULIP_PASSWORD_H_
#define TULIP_PASSWORD_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace tulip {

// scrypt cost parameters. The defaults use 32 MiB per hash; tests and the
// simulation harness lower them.
struct PasswordHashParams {
  std::uint64_t log2_n = 15;
  std::uint32_t r = 8;
  std::uint32_t p = 1;

  static PasswordHashParams fast_for_testing() { return {4, 1, 1}; }
};

// Produces "$scrypt$ln=<log2_n>,r=<r>,p=<p>$<salt>$<hash>" with a random
// 16-byte salt and a 32-byte hash, both base64url.
std::string hash_password(std::string_view password, const PasswordHashParams& params);

// Recomputes the hash using the parameters embedded in the verifier and
// compares in constant time. A malformed verifier never matches.
bool check_password(std::string_view password, std::string_view verifier);

}  // namespace tulip

#endif  // TULIP_PASSWORD_H_
