#ifndef TULIP_TESTS_FIXTURES_H_
#define TULIP_TESTS_FIXTURES_H_

#include <string>

#include "tulip/encoding.h"
#include "tulip/identity_store.h"
#include "tulip/keyring.h"
#include "tulip/password.h"

namespace tulip::testing {

// RFC 6238 test secret "12345678901234567890".
inline const std::string kTotpSecret = "GEZDGNBVGY3TQOJQGEZDGNBVGY3TQOJQ";

inline MemoryDirectory fast_store() { return MemoryDirectory(PasswordHashParams::fast_for_testing()); }

inline NewUser user(std::string name, std::uint64_t count = 3) {
  NewUser u;
  u.username = name;
  u.password = name + "-password";
  u.initial_count = count;
  u.totp_secret = kTotpSecret;
  u.enrollment_group_member = true;
  return u;
}

inline SigningKeyring test_keyring(const std::string& kid = "k1") {
  return SigningKeyring(kid, {{kid, Bytes(32, 0x42)}});
}

}  // namespace tulip::testing

#endif  // TULIP_TESTS_FIXTURES_H_
