#include "tulip/service.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tulip/crypto.h"
#include "tulip/error.h"

namespace tulip {
namespace {

using nlohmann::json;

constexpr std::string_view kHtml = "text/html; charset=utf-8";
constexpr std::string_view kJson = "application/json";

const std::string kRejectionBody =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>Sign-in unavailable</title>"
    "</head>\n<body><h1 data-view=\"gated_401\">Sign-in unavailable</h1></body></html>\n";

const std::string kEnrollDeclinedBody =
    "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>Enrollment failed</title>"
    "</head>\n<body><h1 data-view=\"generic_failure\">Enrollment failed</h1></body></html>\n";

HttpResponse make_response(int status, std::string_view content_type, std::string body) {
  HttpResponse r;
  r.status = status;
  r.set_header("Content-Type", std::string(content_type));
  r.set_header("Cache-Control", "no-store");
  r.set_header("Pragma", "no-cache");
  r.set_header("X-Content-Type-Options", "nosniff");
  r.body = std::move(body);
  return r;
}

HttpResponse not_found() { return make_response(404, "text/plain; charset=utf-8", "Not Found\n"); }

HttpResponse bad_request() {
  return make_response(400, "text/plain; charset=utf-8", "Bad Request\n");
}

HttpResponse json_response(int status, const json& doc) {
  return make_response(status, kJson, doc.dump() + "\n");
}

std::string page(std::string_view title, std::string_view content, bool with_script) {
  std::string out = "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>";
  out += html_escape(title);
  out += "</title>";
  if (with_script) {
    out += "<link rel=\"stylesheet\" href=\"/static/tulip.css\">"
           "<script src=\"/static/tulip.js\" defer></script>";
  }
  out += "</head>\n<body>";
  out += content;
  out += "</body></html>\n";
  return out;
}

std::string input(std::string_view name, std::string_view label, std::string_view type,
                  std::string_view extra = {}) {
  std::string out = "<label>";
  out += html_escape(label);
  out += " <input name=\"" + html_escape(name) + "\" type=\"" + std::string(type) + "\"";
  if (!extra.empty()) out += " " + std::string(extra);
  out += " required></label>\n";
  return out;
}

bool form_content_type(const HttpRequest& request) {
  auto ct = request.header("Content-Type");
  return ct && ct->rfind("application/x-www-form-urlencoded", 0) == 0;
}

std::string content_type_for(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return std::string(kHtml);
  if (ext == ".js") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json") return std::string(kJson);
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  return "application/octet-stream";
}

}  // namespace

class Service::CountingMfa final : public MfaProvider {
 public:
  CountingMfa(MfaProvider* inner, std::atomic<std::uint64_t>& prompts)
      : inner_(inner), prompts_(prompts) {}

  bool approve(const std::string& username) override {
    ++prompts_;
    return inner_->approve(username);
  }

 private:
  MfaProvider* inner_;
  std::atomic<std::uint64_t>& prompts_;
};

ServiceOptions ServiceOptions::from_config(const ServiceConfig& config) {
  ServiceOptions o;
  o.cookie = config.cookie;
  o.token_lifetime = config.token_lifetime;
  o.challenges = config.challenges;
  o.enrollment_allowlist = CidrList::parse(config.enrollment_allowlist);
  if (!config.admin_secret_file.empty()) {
    std::ifstream in(config.admin_secret_file, std::ios::binary);
    if (!in) throw ConfigError("cannot read admin secret file " + config.admin_secret_file);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string secret = buf.str();
    while (!secret.empty() && (secret.back() == '\n' || secret.back() == '\r' || secret.back() == ' ')) {
      secret.pop_back();
    }
    if (secret.size() < 16) throw ConfigError("admin secret must be at least 16 characters");
    o.admin_secret = std::move(secret);
  }
  o.asset_dir = config.asset_dir;
  o.trusted_proxies = CidrList::parse(config.trusted_proxies);
  o.trust_forwarded_for = config.trust_forwarded_for;
  o.gate_mode = config.gate_mode;
  o.dev_insecure = config.dev_insecure;
  o.store_path = config.store_path;
  return o;
}

std::string ServiceStats::to_json() const {
  return json{{"requests", requests},
              {"credential_verifications", credential_verifications},
              {"version_reads", version_reads},
              {"store_accesses", store_accesses},
              {"mfa_prompts", mfa_prompts},
              {"enroll_handler_runs", enroll_handler_runs},
              {"admin_handler_runs", admin_handler_runs},
              {"sessions_granted", sessions_granted}}
      .dump();
}

ServiceStats ServiceStats::from_json(std::string_view text) {
  auto doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw InvalidArgument("stats: not a JSON object");
  ServiceStats s;
  s.requests = doc.value("requests", std::uint64_t{0});
  s.credential_verifications = doc.value("credential_verifications", std::uint64_t{0});
  s.version_reads = doc.value("version_reads", std::uint64_t{0});
  s.store_accesses = doc.value("store_accesses", std::uint64_t{0});
  s.mfa_prompts = doc.value("mfa_prompts", std::uint64_t{0});
  s.enroll_handler_runs = doc.value("enroll_handler_runs", std::uint64_t{0});
  s.admin_handler_runs = doc.value("admin_handler_runs", std::uint64_t{0});
  s.sessions_granted = doc.value("sessions_granted", std::uint64_t{0});
  return s;
}

Service::Service(UserDirectory& store, KeyringHolder& keyring, const Clock& clock,
                 ServiceOptions options, EventLog& events, AuditLog& audit, MfaProvider* mfa)
    : inner_store_(store),
      store_(store),
      keyring_(keyring),
      clock_(clock),
      options_(std::move(options)),
      events_(events),
      audit_(audit),
      admin_(store_, audit_, clock_),
      mfa_(mfa) {}

ServiceStats Service::stats() const {
  ServiceStats s;
  const auto& c = store_.counters();
  s.requests = requests_;
  s.credential_verifications = c.verify_credentials;
  s.version_reads = c.read_version;
  s.store_accesses = c.total_accesses();
  s.mfa_prompts = mfa_prompts_;
  s.enroll_handler_runs = enroll_runs_;
  s.admin_handler_runs = admin_runs_;
  s.sessions_granted = sessions_granted_;
  return s;
}

HttpResponse Service::gate_rejection() {
  return make_response(401, kHtml, kRejectionBody);
}

std::string Service::client_address(const HttpRequest& request) const {
  if (options_.trust_forwarded_for && options_.trusted_proxies.contains(request.peer_address)) {
    if (auto xff = request.header("X-Forwarded-For")) {
      // The right-most entry was appended by our proxy.
      std::string_view v = *xff;
      const auto comma = v.rfind(',');
      if (comma != std::string_view::npos) v = v.substr(comma + 1);
      while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
      while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
      if (parse_ip_address(v)) return std::string(v);
    }
  }
  return request.peer_address;
}

bool Service::secure_transport(const HttpRequest& request) const {
  if (request.tls) return true;
  if (options_.trusted_proxies.contains(request.peer_address)) {
    auto proto = request.header("X-Forwarded-Proto");
    return proto && *proto == "https";
  }
  return false;
}

std::optional<std::string> Service::presented_token(const HttpRequest& request) const {
  return decode_cookie(request.headers, options_.cookie);
}

void Service::log(const std::string& route, std::string verdict, std::string reason,
                  std::string ouid) {
  events_.record({clock_.now(), route, std::move(verdict), std::move(reason), std::move(ouid)});
}

void Service::persist_store() {
  if (options_.store_path.empty()) return;
  std::lock_guard lock(persist_mu_);
  persist(inner_store_.snapshot(), options_.store_path);
}

HttpResponse Service::handle(const HttpRequest& request) {
  ++requests_;
  const std::string route = request.method + " " + request.path;
  const std::string& path = request.path;

  if (path == "/healthz" && request.method == "GET") return healthz();

  if (path == "/login") {
    if (request.method == "GET") return get_login(request);
    if (request.method == "POST") return post_login(request);
    return make_response(405, "text/plain; charset=utf-8", "Method Not Allowed\n");
  }

  const bool enroll_route = path == "/enroll" || path == "/enroll/descriptor";
  const bool admin_route = path.rfind("/admin/", 0) == 0;
  if (enroll_route || admin_route) {
    const std::string client = client_address(request);
    if (!options_.enrollment_allowlist.contains(client)) {
      log(route, "not_found", "off_network", "");
      return not_found();
    }
    if (admin_route) {
      if (request.method != "POST") return not_found();
      return admin(request, std::string_view(path).substr(7));
    }
    if (path == "/enroll/descriptor" && request.method == "GET") return enroll_descriptor();
    if (path == "/enroll" && request.method == "GET") return get_enroll(request);
    if (path == "/enroll" && request.method == "POST") return post_enroll(request, client);
    return make_response(405, "text/plain; charset=utf-8", "Method Not Allowed\n");
  }

  if (path.rfind("/static/", 0) == 0 && request.method == "GET") {
    return static_asset(std::string_view(path).substr(8));
  }
  return not_found();
}

HttpResponse Service::healthz() {
  return json_response(200, {{"status", "ok"},
                             {"mode", options_.gate_mode == GateMode::kEnforce ? "tulip" : "baseline"}});
}

HttpResponse Service::get_enroll(const HttpRequest& request) {
  (void)request;
  std::string form = "<h1>Enroll this device</h1>\n<form data-view=\"enroll_form\" method=\"post\" action=\"/enroll\">\n";
  form += input("username", "Username", "text", "autocomplete=\"username\"");
  form += input("password", "Password", "password", "autocomplete=\"current-password\"");
  for (const auto& c : options_.challenges.challenges) {
    if (c.kind == ChallengeKind::kTotp) {
      form += input(c.id, "One-time code", "text",
                    "inputmode=\"numeric\" autocomplete=\"one-time-code\" pattern=\"[0-9]*\"");
    } else if (c.kind == ChallengeKind::kStaticAttribute) {
      form += input(c.id, c.attribute, "text");
    }
  }
  form += "<button type=\"submit\">Enroll</button>\n</form>\n";
  return make_response(200, kHtml, page("Device enrollment", form, !options_.asset_dir.empty()));
}

HttpResponse Service::enroll_descriptor() {
  json fields = json::array();
  fields.push_back({{"name", "username"}, {"type", "text"}, {"label", "Username"}});
  fields.push_back({{"name", "password"}, {"type", "password"}, {"label", "Password"}});
  json challenges = json::array();
  for (const auto& c : options_.challenges.challenges) {
    challenges.push_back({{"id", c.id}, {"kind", std::string(to_string(c.kind))}});
    if (c.kind == ChallengeKind::kTotp) {
      fields.push_back({{"name", c.id}, {"type", "totp"}, {"label", "One-time code"}});
    } else if (c.kind == ChallengeKind::kStaticAttribute) {
      fields.push_back({{"name", c.id}, {"type", "text"}, {"label", c.attribute}});
    }
  }
  return json_response(200, {{"fields", fields}, {"challenges", challenges}});
}

HttpResponse Service::post_enroll(const HttpRequest& request, const std::string& client) {
  ++enroll_runs_;
  const std::string route = "POST /enroll";
  if (!form_content_type(request)) {
    log(route, "bad_request", "content_type", "");
    return bad_request();
  }
  auto form = parse_form(request.body);
  if (!form || !form->contains("username") || !form->contains("password")) {
    log(route, "bad_request", "malformed_form", "");
    return bad_request();
  }
  const auto response_fields = options_.challenges.response_fields();
  EnrollmentRequest er;
  er.presented_token = presented_token(request);
  er.client_address = client;
  for (auto& [name, value] : *form) {
    if (name == "username") {
      er.username = value;
    } else if (name == "password") {
      er.password = value;
    } else if (std::find(response_fields.begin(), response_fields.end(), name) !=
               response_fields.end()) {
      er.challenge_responses.emplace(name, value);
    } else {
      log(route, "bad_request", "unknown_field", "");
      return bad_request();
    }
  }
  if (!options_.dev_insecure && !secure_transport(request)) {
    log(route, "refused", "plaintext_transport", "");
    return make_response(403, "text/plain; charset=utf-8", "Enrollment requires HTTPS\n");
  }

  EnrollmentSettings settings;
  settings.token_lifetime = options_.token_lifetime;
  const auto keyring = keyring_.get();
  const EnrollmentOutcome outcome =
      enroll(er, store_, *keyring, options_.challenges, clock_.now(), settings);

  if (!outcome.accepted) {
    log(route, "declined", std::string(to_string(*outcome.reason)), outcome.ouid);
    return make_response(401, kHtml, kEnrollDeclinedBody);
  }
  if (outcome.reused) {
    log(route, "accepted", "reused", outcome.ouid);
    return make_response(
        200, kHtml,
        page("Device enrolled", "<h1 data-view=\"enroll_reused\">This device is already enrolled</h1>\n",
             !options_.asset_dir.empty()));
  }
  try {
    persist_store();
  } catch (const std::exception& e) {
    log(route, "warning", std::string("persist_failed: ") + e.what(), outcome.ouid);
  }
  log(route, "accepted", "minted", outcome.ouid);
  CookiePolicy cookie = options_.cookie;
  cookie.max_age = options_.token_lifetime;
  HttpResponse r = make_response(
      200, kHtml,
      page("Device enrolled", "<h1 data-view=\"enroll_success\">This device is now enrolled</h1>\n",
           !options_.asset_dir.empty()));
  r.headers.emplace_back("Set-Cookie", encode_cookie(outcome.token, cookie));
  return r;
}

HttpResponse Service::get_login(const HttpRequest& request) {
  const std::string route = "GET /login";
  if (options_.gate_mode == GateMode::kEnforce) {
    const auto keyring = keyring_.get();
    const GateDecision d = gate(presented_token(request), store_, *keyring, clock_.now());
    if (!d.serve()) {
      log(route, "reject", std::string(to_string(*d.reason)), d.ouid);
      return gate_rejection();
    }
    log(route, "serve", "", d.ouid);
  } else {
    log(route, "serve", "gate_bypassed", "");
  }
  std::string form = "<h1>Sign in</h1>\n<form data-view=\"login_form\" method=\"post\" action=\"/login\">\n";
  form += input("username", "Username", "text", "autocomplete=\"username\"");
  form += input("password", "Password", "password", "autocomplete=\"current-password\"");
  form += "<button type=\"submit\">Sign in</button>\n</form>\n";
  return make_response(200, kHtml, page("Sign in", form, !options_.asset_dir.empty()));
}

HttpResponse Service::post_login(const HttpRequest& request) {
  const std::string route = "POST /login";
  const auto keyring = keyring_.get();
  CredentialReader read_form = [&request]() -> std::optional<Credentials> {
    if (!form_content_type(request)) return std::nullopt;
    auto form = parse_form(request.body);
    if (!form) return std::nullopt;
    auto user = form->find("username");
    auto pass = form->find("password");
    if (user == form->end() || pass == form->end()) return std::nullopt;
    return Credentials{user->second, pass->second};
  };
  std::optional<CountingMfa> counting;
  LoginOptions opts;
  opts.mode = options_.gate_mode;
  if (mfa_ != nullptr) {
    counting.emplace(mfa_, mfa_prompts_);
    opts.mfa = &*counting;
  }
  const LoginResult result =
      process_login(presented_token(request), read_form, store_, *keyring, clock_.now(), opts);
  if (!result.granted()) {
    std::string reason = result.gate.reason ? std::string(to_string(*result.gate.reason))
                                            : std::string(to_string(*result.failure));
    log(route, "reject", std::move(reason), result.gate.ouid);
    return gate_rejection();
  }
  ++sessions_granted_;
  {
    std::lock_guard lock(sessions_mu_);
    sessions_[result.grant->session_id] = result.grant->username;
  }
  log(route, "session", "", result.gate.ouid);
  HttpResponse r = make_response(
      200, kHtml,
      page("Signed in",
           "<h1 data-view=\"login_success\">Signed in as " + html_escape(result.grant->username) +
               "</h1>\n",
           !options_.asset_dir.empty()));
  r.headers.emplace_back("Set-Cookie", "tulip_session=" + result.grant->session_id +
                                           "; HttpOnly; Secure; SameSite=Lax");
  return r;
}

HttpResponse Service::admin(const HttpRequest& request, std::string_view verb) {
  const std::string route = "POST /admin/" + std::string(verb);
  if (options_.admin_secret.empty()) {
    log(route, "not_found", "admin_disabled", "");
    return not_found();
  }
  auto auth = request.header("Authorization");
  const std::string prefix = "Bearer ";
  if (!auth || auth->rfind(prefix, 0) != 0 ||
      !constant_time_equal(std::string_view(*auth).substr(prefix.size()), options_.admin_secret)) {
    log(route, "unauthorized", "bad_admin_secret", "");
    return json_response(401, {{"error", "unauthorized"}});
  }
  ++admin_runs_;
  if (verb == "stats") return make_response(200, kJson, stats().to_json() + "\n");

  auto parsed = parse_admin_verb(verb);
  if (!parsed) return json_response(404, {{"error", "unknown admin verb"}});
  try {
    const AdminCommand cmd = AdminCommand::from_json(*parsed, request.body);
    const AdminResult result = admin_.execute(cmd);
    if (is_mutating(*parsed)) persist_store();
    log(route, "ok", "", "");
    return make_response(200, kJson, result.to_json() + "\n");
  } catch (const UnknownUserError& e) {
    log(route, "error", "unknown_user", "");
    return json_response(404, {{"error", e.what()}});
  } catch (const InvalidArgument& e) {
    log(route, "error", "invalid_argument", "");
    return json_response(400, {{"error", e.what()}});
  } catch (const std::exception& e) {
    log(route, "error", "internal", "");
    return json_response(500, {{"error", "internal error"}});
  }
}

HttpResponse Service::static_asset(std::string_view relative) {
  if (options_.asset_dir.empty() || relative.empty()) return not_found();
  const std::filesystem::path rel(relative);
  for (const auto& part : rel) {
    if (part == ".." || part == "." || part.string().empty()) return not_found();
  }
  if (rel.is_absolute()) return not_found();
  const auto full = std::filesystem::path(options_.asset_dir) / rel;
  std::error_code ec;
  if (!std::filesystem::is_regular_file(full, ec)) return not_found();
  std::ifstream in(full, std::ios::binary);
  if (!in) return not_found();
  std::ostringstream buf;
  buf << in.rdbuf();
  HttpResponse r;
  r.status = 200;
  r.set_header("Content-Type", content_type_for(full));
  r.set_header("X-Content-Type-Options", "nosniff");
  r.body = buf.str();
  return r;
}

}  // namespace tulip
