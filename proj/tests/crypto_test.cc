#include <gtest/gtest.h>

#include <regex>
#include <set>

#include "oracles.h"
#include "tulip/crypto.h"
#include "tulip/encoding.h"

namespace tulip {
namespace {

TEST(Hmac, Rfc4231Case2) {
  const auto mac = hmac_sha256(to_bytes("Jefe"), "what do ya want for nothing?");
  EXPECT_EQ(hex_encode(mac), "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(Hmac, Sha1MatchesOracle) {
  const std::string key = "12345678901234567890";
  const std::string msg = "message";
  const auto mac = hmac_sha1(to_bytes(key), to_bytes(msg));
  const std::string expected = oracle::hmac(EVP_sha1(), key, msg);
  EXPECT_EQ(std::string(mac.begin(), mac.end()), expected);
}

TEST(ConstantTimeEqual, ComparesContent) {
  EXPECT_TRUE(constant_time_equal(std::string_view("abc"), std::string_view("abc")));
  EXPECT_FALSE(constant_time_equal(std::string_view("abc"), std::string_view("abd")));
  EXPECT_FALSE(constant_time_equal(std::string_view("abc"), std::string_view("abcd")));
  EXPECT_TRUE(constant_time_equal(std::string_view(""), std::string_view("")));
}

TEST(RandomUuid, IsCanonicalVersion4AndUnique) {
  const std::regex shape("^[0-9a-f]{8}-[0-9a-f]{4}-4[0-9a-f]{3}-[89ab][0-9a-f]{3}-[0-9a-f]{12}$");
  std::set<std::string> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::string u = random_uuid();
    EXPECT_TRUE(std::regex_match(u, shape)) << u;
    seen.insert(u);
  }
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(RandomBytes, Length) {
  EXPECT_EQ(random_bytes(0).size(), 0u);
  EXPECT_EQ(random_bytes(33).size(), 33u);
}

}  // namespace
}  // namespace tulip
