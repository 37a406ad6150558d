// tulip-server: serves /enroll, /login and /admin from a JSON config.
//
//   tulip-server --config /etc/tulip/config.json
//
// SIGHUP reloads the signing keyring; SIGINT/SIGTERM stop the server.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "CLI11.hpp"
#include "tulip/admin.h"
#include "tulip/config.h"
#include "tulip/error.h"
#include "tulip/event_log.h"
#include "tulip/http_server.h"
#include "tulip/identity_store.h"
#include "tulip/keyring.h"
#include "tulip/service.h"

int main(int argc, char** argv) {
  CLI::App app{"TULIP login front-door"};
  std::string config_path;
  bool dev_insecure = false;
  app.add_option("-c,--config", config_path, "Service config (JSON)")->envname("TULIP_CONFIG")->required();
  app.add_flag("--dev-insecure", dev_insecure, "Issue cookies over plain HTTP (development only)");
  CLI11_PARSE(app, argc, argv);

  tulip::ServiceConfig config;
  std::unique_ptr<tulip::KeyringHolder> keyring;
  std::unique_ptr<tulip::MemoryDirectory> store;
  tulip::ServiceOptions options;
  try {
    config = tulip::ServiceConfig::load(config_path);
    if (dev_insecure) config.dev_insecure = true;
    keyring = std::make_unique<tulip::KeyringHolder>(tulip::SigningKeyring::load(config.keyring_path));
    if (std::filesystem::exists(config.store_path)) {
      store = std::make_unique<tulip::MemoryDirectory>(tulip::load(config.store_path), config.password_hash);
    } else {
      store = std::make_unique<tulip::MemoryDirectory>(config.password_hash);
    }
    options = tulip::ServiceOptions::from_config(config);
  } catch (const tulip::Error& e) {
    std::cerr << "tulip-server: " << e.what() << "\n";
    return 2;
  }
  if (config.dev_insecure) {
    std::cerr << "tulip-server: WARNING dev_insecure is set; cookies may be issued without TLS\n";
  }

  std::ofstream event_file;
  if (!config.event_log_path.empty()) event_file.open(config.event_log_path, std::ios::app);
  tulip::EventLog events(event_file.is_open() ? static_cast<std::ostream*>(&event_file) : nullptr);
  std::unique_ptr<tulip::AuditLog> audit = config.audit_log_path.empty()
                                               ? std::make_unique<tulip::AuditLog>()
                                               : std::make_unique<tulip::AuditLog>(config.audit_log_path);
  tulip::SystemClock clock;
  tulip::Service service(*store, *keyring, clock, options, events, *audit);
  tulip::HttpServer server(service);

  // Handle signals on a dedicated thread; block them everywhere else.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGHUP);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  int port = 0;
  try {
    port = server.bind(config.listen_host, config.listen_port);
  } catch (const tulip::Error& e) {
    std::cerr << "tulip-server: " << e.what() << "\n";
    return 2;
  }
  std::cerr << "tulip-server: listening on " << config.listen_host << ":" << port << " ("
            << (config.gate_mode == tulip::GateMode::kEnforce ? "tulip" : "baseline") << " mode)\n";

  std::thread signal_thread([&] {
    while (true) {
      int sig = 0;
      if (sigwait(&signals, &sig) != 0) continue;
      if (sig == SIGHUP) {
        try {
          keyring->replace(tulip::SigningKeyring::load(config.keyring_path));
          std::cerr << "tulip-server: keyring reloaded\n";
        } catch (const tulip::Error& e) {
          std::cerr << "tulip-server: keyring reload failed: " << e.what() << "\n";
        }
        continue;
      }
      server.stop();
      return;
    }
  });

  server.serve();
  if (signal_thread.joinable()) {
    // serve() can also return on its own; wake the signal thread.
    pthread_kill(signal_thread.native_handle(), SIGTERM);
    signal_thread.join();
  }
  return 0;
}
