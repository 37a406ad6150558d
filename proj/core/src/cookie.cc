#include "tulip/cookie.h"

#include <algorithm>
#include <cctype>

#include "tulip/error.h"

namespace tulip {
namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string encode_cookie(std::string_view token, const CookiePolicy& policy) {
  if (token.empty()) throw InvalidArgument("encode_cookie: empty token");
  std::string out;
  out.append(policy.name).append("=").append(token);
  out.append("; Max-Age=").append(std::to_string(policy.max_age));
  out.append("; HttpOnly; Secure; SameSite=");
  out.append(policy.same_site == SameSite::kStrict ? "Strict" : "Lax");
  return out;
}

std::optional<std::string> decode_cookie(const HeaderList& request_headers,
                                         const CookiePolicy& policy) {
  for (const auto& [name, value] : request_headers) {
    if (!iequals(name, "Cookie")) continue;
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto semi = rest.find(';');
      std::string_view pair = trim(rest.substr(0, semi));
      rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
      const auto eq = pair.find('=');
      if (eq == std::string_view::npos) continue;
      if (trim(pair.substr(0, eq)) != policy.name) continue;
      std::string_view v = trim(pair.substr(eq + 1));
      if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
      if (v.empty()) return std::nullopt;
      return std::string(v);
    }
  }
  return std::nullopt;
}

}  // namespace tulip
