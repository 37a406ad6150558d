#ifndef TULIP_COOKIE_H_
#define TULIP_COOKIE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tulip/token.h"

namespace tulip {

enum class SameSite { kLax, kStrict };

// HttpOnly and Secure are not configurable: every emitted cookie carries both.
struct CookiePolicy {
  std::string name = "tulip_token";
  SameSite same_site = SameSite::kLax;
  std::int64_t max_age = kDefaultTokenLifetime;
};

using HeaderList = std::vector<std::pair<std::string, std::string>>;

// Set-Cookie header value, e.g.
//   tulip_token=abc; Max-Age=15552000; HttpOnly; Secure; SameSite=Lax
// Throws InvalidArgument on an empty token.
std::string encode_cookie(std::string_view token, const CookiePolicy& policy);

// Looks up the policy's cookie in every Cookie header (case-insensitive
// header name). Garbage yields nullopt; it never throws.
std::optional<std::string> decode_cookie(const HeaderList& request_headers,
                                         const CookiePolicy& policy = {});

}  // namespace tulip

#endif  // TULIP_COOKIE_H_
