#ifndef TULIP_HTTP_MESSAGE_H_
#define TULIP_HTTP_MESSAGE_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tulip/cookie.h"

namespace tulip {

// Transport-neutral request/response. The HTTP server adapter and the
// in-process harness transport both speak these.
struct HttpRequest {
  std::string method;
  std::string path;
  HeaderList headers;
  std::string body;
  // Socket peer address.
  std::string peer_address;
  // True when the connection itself is TLS.
  bool tls = false;

  std::optional<std::string> header(std::string_view name) const;
};

struct HttpResponse {
  int status = 200;
  HeaderList headers;
  std::string body;

  std::optional<std::string> header(std::string_view name) const;
  void set_header(std::string name, std::string value);

  // Status line, headers sorted by lower-cased name (Date excluded) and body,
  // for byte-level comparison of responses.
  std::string canonical_bytes() const;
};

using FormFields = std::map<std::string, std::string>;

// application/x-www-form-urlencoded. Returns nullopt on bad percent-escapes
// or duplicate field names.
std::optional<FormFields> parse_form(std::string_view body);
std::string url_encode(std::string_view s);
std::string encode_form(const FormFields& fields);

std::string html_escape(std::string_view s);

}  // namespace tulip

#endif  // TULIP_HTTP_MESSAGE_H_
