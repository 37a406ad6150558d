#include "tulip/http_server.h"

#include <mutex>

#include "httplib.h"
#include "tulip/error.h"

namespace tulip {

struct HttpServer::Impl {
  explicit Impl(Service& s) : service(s) {}

  void dispatch(const httplib::Request& req, httplib::Response& res) {
    HttpRequest request;
    request.method = req.method;
    request.path = req.path;
    request.body = req.body;
    request.peer_address = req.remote_addr;
    for (const auto& [k, v] : req.headers) {
      // httplib injects these pseudo-headers.
      if (k == "REMOTE_ADDR" || k == "REMOTE_PORT" || k == "LOCAL_ADDR" || k == "LOCAL_PORT") {
        continue;
      }
      request.headers.emplace_back(k, v);
    }
    const HttpResponse response = service.handle(request);
    res.status = response.status;
    std::string content_type = "text/plain";
    for (const auto& [k, v] : response.headers) {
      if (k == "Content-Type") {
        content_type = v;
      } else {
        res.headers.emplace(k, v);
      }
    }
    res.set_content(response.body, content_type);
  }

  Service& service;
  httplib::Server server;
  std::mutex mu;
  bool serving = false;
  bool stop_requested = false;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    impl_->dispatch(req, res);
  };
  impl_->server.set_tcp_nodelay(true);
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Delete(".*", handler);
  impl_->server.Patch(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound <= 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::serve() {
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->stop_requested) return;
    impl_->serving = true;
  }
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (!impl_) return;
  {
    std::lock_guard lock(impl_->mu);
    impl_->stop_requested = true;
    if (!impl_->serving) return;
  }
  // A stop issued before the accept loop is up would be lost.
  impl_->server.wait_until_ready();
  impl_->server.stop();
}

}  // namespace tulip
