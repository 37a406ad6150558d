#include "tulip/crypto.h"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include "tulip/error.h"

namespace tulip {

Sha256Mac hmac_sha256(std::span<const std::uint8_t> key, std::string_view message) {
  Sha256Mac out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
           reinterpret_cast<const unsigned char*>(message.data()), message.size(),
           out.data(), &len) == nullptr ||
      len != out.size()) {
    throw Error("HMAC-SHA256 failed");
  }
  return out;
}

Sha1Mac hmac_sha1(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message) {
  Sha1Mac out{};
  unsigned int len = 0;
  if (HMAC(EVP_sha1(), key.data(), static_cast<int>(key.size()), message.data(),
           message.size(), out.data(), &len) == nullptr ||
      len != out.size()) {
    throw Error("HMAC-SHA1 failed");
  }
  return out;
}

bool constant_time_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

bool constant_time_equal(std::string_view a, std::string_view b) {
  return constant_time_equal(
      std::span(reinterpret_cast<const std::uint8_t*>(a.data()), a.size()),
      std::span(reinterpret_cast<const std::uint8_t*>(b.data()), b.size()));
}

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) {
    throw Error("RAND_bytes failed");
  }
  return out;
}

std::string random_uuid() {
  Bytes b = random_bytes(16);
  b[6] = static_cast<std::uint8_t>((b[6] & 0x0f) | 0x40);
  b[8] = static_cast<std::uint8_t>((b[8] & 0x3f) | 0x80);
  const std::string hex = hex_encode(b);
  return hex.substr(0, 8) + "-" + hex.substr(8, 4) + "-" + hex.substr(12, 4) + "-" +
         hex.substr(16, 4) + "-" + hex.substr(20, 12);
}

}  // namespace tulip
