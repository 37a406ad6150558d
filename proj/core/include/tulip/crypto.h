#ifndef TULIP_CRYPTO_H_
#define TULIP_CRYPTO_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "tulip/encoding.h"

namespace tulip {

using Sha256Mac = std::array<std::uint8_t, 32>;
using Sha1Mac = std::array<std::uint8_t, 20>;

Sha256Mac hmac_sha256(std::span<const std::uint8_t> key, std::string_view message);
Sha1Mac hmac_sha1(std::span<const std::uint8_t> key, std::span<const std::uint8_t> message);

// Compares in time dependent only on the lengths of the inputs.
bool constant_time_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
bool constant_time_equal(std::string_view a, std::string_view b);

// CSPRNG output. Throws tulip::Error if the generator fails.
Bytes random_bytes(std::size_t n);

// 128 random bits rendered as a canonical lower-case RFC 4122 version 4 UUID.
std::string random_uuid();

}  // namespace tulip

#endif  // TULIP_CRYPTO_H_
