#ifndef TULIP_ENCODING_H_
#define TULIP_ENCODING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tulip {

using Bytes = std::vector<std::uint8_t>;

Bytes to_bytes(std::string_view s);

// RFC 4648 section 5 alphabet, no padding.
std::string base64url_encode(std::span<const std::uint8_t> data);
std::string base64url_encode(std::string_view data);

// Strict decoder: rejects padding, characters outside the alphabet and any
// non-canonical encoding (non-zero unused trailing bits), so that exactly one
// text form exists for every byte string.
std::optional<Bytes> base64url_decode(std::string_view text);

// RFC 4648 base32 (TOTP secrets). Decoding ignores case, spaces and padding.
std::string base32_encode(std::span<const std::uint8_t> data);
std::optional<Bytes> base32_decode(std::string_view text);

std::string hex_encode(std::span<const std::uint8_t> data);

}  // namespace tulip

#endif  // TULIP_ENCODING_H_
