#include "tulip/password.h"

#include <openssl/evp.h>

#include <charconv>
#include <optional>
#include <vector>

#include "tulip/crypto.h"
#include "tulip/encoding.h"
#include "tulip/error.h"

namespace tulip {
namespace {

constexpr std::size_t kSaltBytes = 16;
constexpr std::size_t kHashBytes = 32;

Bytes derive(std::string_view password, std::span<const std::uint8_t> salt,
             const PasswordHashParams& params) {
  Bytes out(kHashBytes);
  const std::uint64_t n = std::uint64_t{1} << params.log2_n;
  // OpenSSL's default 32 MiB cap is too small for r=8, N=2^15 plus overhead.
  const std::uint64_t max_mem = 128 * n * params.r * params.p + (std::uint64_t{64} << 20);
  if (EVP_PBE_scrypt(password.data(), password.size(), salt.data(), salt.size(), n, params.r,
                     params.p, max_mem, out.data(), out.size()) != 1) {
    throw Error("scrypt failed");
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

struct ParsedVerifier {
  PasswordHashParams params;
  Bytes salt;
  Bytes hash;
};

std::optional<ParsedVerifier> parse_verifier(std::string_view verifier) {
  // "", "scrypt", "ln=..,r=..,p=..", salt, hash
  auto parts = split(verifier, '$');
  if (parts.size() != 5 || !parts[0].empty() || parts[1] != "scrypt") return std::nullopt;
  auto fields = split(parts[2], ',');
  if (fields.size() != 3) return std::nullopt;
  if (!fields[0].starts_with("ln=") || !fields[1].starts_with("r=") ||
      !fields[2].starts_with("p=")) {
    return std::nullopt;
  }
  auto ln = parse_number<std::uint64_t>(fields[0].substr(3));
  auto r = parse_number<std::uint32_t>(fields[1].substr(2));
  auto p = parse_number<std::uint32_t>(fields[2].substr(2));
  if (!ln || !r || !p || *ln < 1 || *ln > 24 || *r == 0 || *p == 0) return std::nullopt;
  auto salt = base64url_decode(parts[3]);
  auto hash = base64url_decode(parts[4]);
  if (!salt || !hash || hash->size() != kHashBytes) return std::nullopt;
  return ParsedVerifier{{*ln, *r, *p}, std::move(*salt), std::move(*hash)};
}

}  // namespace

std::string hash_password(std::string_view password, const PasswordHashParams& params) {
  const Bytes salt = random_bytes(kSaltBytes);
  const Bytes hash = derive(password, salt, params);
  return "$scrypt$ln=" + std::to_string(params.log2_n) + ",r=" + std::to_string(params.r) +
         ",p=" + std::to_string(params.p) + "$" + base64url_encode(salt) + "$" +
         base64url_encode(hash);
}

bool check_password(std::string_view password, std::string_view verifier) {
  auto parsed = parse_verifier(verifier);
  if (!parsed) return false;
  const Bytes candidate = derive(password, parsed->salt, parsed->params);
  return constant_time_equal(candidate, parsed->hash);
}

}  // namespace tulip
