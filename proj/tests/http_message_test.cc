#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "tulip/event_log.h"
#include "tulip/http_message.h"

namespace tulip {
namespace {

TEST(Form, ParsesAndDecodes) {
  auto f = parse_form("username=alice&password=p%40ss+word&otp=123456");
  ASSERT_TRUE(f);
  EXPECT_EQ(f->at("username"), "alice");
  EXPECT_EQ(f->at("password"), "p@ss word");
  EXPECT_EQ(f->at("otp"), "123456");
  EXPECT_TRUE(parse_form("")->empty());
}

TEST(Form, RejectsBadEscapesAndDuplicates) {
  EXPECT_FALSE(parse_form("a=%"));
  EXPECT_FALSE(parse_form("a=%4"));
  EXPECT_FALSE(parse_form("a=%zz"));
  EXPECT_FALSE(parse_form("a=1&a=2"));
}

TEST(Form, EncodeRoundTrips) {
  const FormFields fields = {{"user name", "a&b=c"}, {"p", "%+/ é"}};
  EXPECT_EQ(parse_form(encode_form(fields)), fields);
}

TEST(HtmlEscape, EscapesMarkup) {
  EXPECT_EQ(html_escape("<a href=\"x\">&'</a>"), "&lt;a href=&quot;x&quot;&gt;&amp;&#39;&lt;/a&gt;");
}

TEST(HttpResponse, CanonicalBytesIgnoreDateAndHeaderOrder) {
  HttpResponse a;
  a.status = 401;
  a.headers = {{"Content-Type", "text/html"}, {"Date", "Mon"}, {"Cache-Control", "no-store"}};
  a.body = "x";
  HttpResponse b = a;
  b.headers = {{"cache-control", "no-store"}, {"Content-Type", "text/html"}, {"Date", "Tue"}};
  EXPECT_EQ(a.canonical_bytes(), b.canonical_bytes());
  b.body = "y";
  EXPECT_NE(a.canonical_bytes(), b.canonical_bytes());
}

TEST(HttpRequest, HeaderLookupIsCaseInsensitive) {
  HttpRequest r;
  r.headers = {{"content-type", "text/plain"}};
  EXPECT_EQ(r.header("Content-Type"), "text/plain");
  EXPECT_FALSE(r.header("Cookie"));
}

TEST(EventLog, RecordsAndNotifies) {
  std::ostringstream sink;
  EventLog log(&sink, 2);
  int seen = 0;
  log.set_observer([&](const RequestEvent&) { ++seen; });
  log.record({1, "GET /login", "reject", "no_token", ""});
  log.record({2, "GET /login", "serve", "", "u-1"});
  log.record({3, "POST /login", "reject", "version_mismatch", "u-1"});
  EXPECT_EQ(seen, 3);
  EXPECT_EQ(log.total(), 3u);
  const auto recent = log.recent();
  ASSERT_EQ(recent.size(), 2u);
  EXPECT_EQ(recent.front().timestamp, 2);
  EXPECT_NE(sink.str().find("\"reason\":\"version_mismatch\""), std::string::npos);
  const std::string written = sink.str();
  EXPECT_EQ(std::count(written.begin(), written.end(), '\n'), 3);
}

}  // namespace
}  // namespace tulip
