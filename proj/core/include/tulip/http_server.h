#ifndef TULIP_HTTP_SERVER_H_
#define TULIP_HTTP_SERVER_H_

#include <memory>
#include <string>

#include "tulip/service.h"

namespace tulip {

// Binds a Service to a plaintext HTTP listener (cpp-httplib). TLS is
// expected to terminate at a reverse proxy in front of it.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port; port 0 picks an ephemeral one. Throws
  // tulip::Error if binding fails.
  int bind(const std::string& host, int port);
  // Blocks until stop() is called.
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tulip

#endif  // TULIP_HTTP_SERVER_H_
