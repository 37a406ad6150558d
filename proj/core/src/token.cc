#include "tulip/token.h"

#include "json.hpp"
#include "tulip/crypto.h"
#include "tulip/error.h"
#include "tulip/identity_store.h"

namespace tulip {
namespace {

using nlohmann::json;

struct Segments {
  std::string_view header;
  std::string_view claims;
  std::string_view signature;
};

std::optional<Segments> split(std::string_view token) {
  const auto first = token.find('.');
  if (first == std::string_view::npos) return std::nullopt;
  const auto second = token.find('.', first + 1);
  if (second == std::string_view::npos) return std::nullopt;
  if (token.find('.', second + 1) != std::string_view::npos) return std::nullopt;
  Segments s{token.substr(0, first), token.substr(first + 1, second - first - 1),
             token.substr(second + 1)};
  if (s.header.empty() || s.claims.empty() || s.signature.empty()) return std::nullopt;
  return s;
}

std::optional<json> decode_json_segment(std::string_view segment) {
  auto bytes = base64url_decode(segment);
  if (!bytes) return std::nullopt;
  auto doc = json::parse(bytes->begin(), bytes->end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
  return doc;
}

std::optional<std::string> header_key_id(const json& header) {
  if (header.size() != 3) return std::nullopt;
  auto alg = header.find("alg");
  auto kid = header.find("kid");
  auto typ = header.find("typ");
  if (alg == header.end() || kid == header.end() || typ == header.end()) return std::nullopt;
  if (!alg->is_string() || *alg != "HS256") return std::nullopt;
  if (!typ->is_string() || *typ != "JWT") return std::nullopt;
  if (!kid->is_string()) return std::nullopt;
  return kid->get<std::string>();
}

std::optional<EnrollmentToken> parse_claims(const json& claims) {
  if (claims.size() != 4) return std::nullopt;
  auto ouid = claims.find("ouid");
  auto ver = claims.find("ver");
  auto iat = claims.find("iat");
  auto exp = claims.find("exp");
  if (ouid == claims.end() || ver == claims.end() || iat == claims.end() || exp == claims.end()) {
    return std::nullopt;
  }
  if (!ouid->is_string() || !ver->is_number_unsigned() || !iat->is_number_integer() ||
      !exp->is_number_integer()) {
    return std::nullopt;
  }
  EnrollmentToken t;
  t.ouid = ouid->get<std::string>();
  t.version = ver->get<std::uint64_t>();
  t.issued_at = iat->get<std::int64_t>();
  t.expires_at = exp->get<std::int64_t>();
  if (t.ouid.empty() || t.expires_at <= t.issued_at) return std::nullopt;
  return t;
}

}  // namespace

std::string_view to_string(VerifyFailure f) {
  switch (f) {
    case VerifyFailure::kMalformed: return "malformed";
    case VerifyFailure::kUnknownKey: return "unknown_key";
    case VerifyFailure::kBadSignature: return "bad_signature";
    case VerifyFailure::kExpired: return "expired";
  }
  return "unknown";
}

std::string sign_token(const EnrollmentToken& claims, const SigningKeyring& keyring) {
  const Bytes* key = keyring.find(claims.key_id);
  if (key == nullptr) throw KeyError("no key '" + claims.key_id + "' in keyring");
  if (key->size() < SigningKeyring::kMinKeyBytes) throw KeyError("signing key too short");

  // nlohmann::json orders object keys, so serialization is deterministic.
  const json header = {{"alg", "HS256"}, {"kid", claims.key_id}, {"typ", "JWT"}};
  const json body = {{"ouid", claims.ouid},
                     {"ver", claims.version},
                     {"iat", claims.issued_at},
                     {"exp", claims.expires_at}};
  std::string signing_input = base64url_encode(header.dump()) + "." + base64url_encode(body.dump());
  const Sha256Mac mac = hmac_sha256(*key, signing_input);
  return signing_input + "." + base64url_encode(mac);
}

std::string mint_token(const UserRecord& user, UnixTime now, std::int64_t lifetime,
                       const SigningKeyring& keyring) {
  if (user.sso_jwt_ouid.empty()) {
    throw ConfigError("user '" + user.username + "' has no sso_jwt_ouid");
  }
  if (lifetime <= 0) throw ConfigError("token lifetime must be positive");
  EnrollmentToken claims;
  claims.ouid = user.sso_jwt_ouid;
  claims.version = user.sso_jwt_version;
  claims.issued_at = now;
  claims.expires_at = now + lifetime;
  claims.key_id = keyring.active_key_id();
  return sign_token(claims, keyring);
}

VerifyResult verify_token(std::string_view serialized, UnixTime now,
                          const SigningKeyring& keyring) {
  auto segments = split(serialized);
  if (!segments) return VerifyFailure::kMalformed;

  auto signature = base64url_decode(segments->signature);
  if (!signature || signature->size() != std::tuple_size_v<Sha256Mac>) {
    return VerifyFailure::kMalformed;
  }
  auto header = decode_json_segment(segments->header);
  if (!header) return VerifyFailure::kMalformed;
  auto kid = header_key_id(*header);
  if (!kid) return VerifyFailure::kMalformed;

  const Bytes* key = keyring.find(*kid);
  if (key == nullptr) return VerifyFailure::kUnknownKey;

  const std::string_view signing_input =
      serialized.substr(0, segments->header.size() + 1 + segments->claims.size());
  const Sha256Mac expected = hmac_sha256(*key, signing_input);
  if (!constant_time_equal(expected, *signature)) return VerifyFailure::kBadSignature;

  auto body = decode_json_segment(segments->claims);
  if (!body) return VerifyFailure::kMalformed;
  auto claims = parse_claims(*body);
  if (!claims) return VerifyFailure::kMalformed;
  claims->key_id = *kid;

  if (now >= claims->expires_at) return VerifyFailure::kExpired;
  return *std::move(claims);
}

}  // namespace tulip
