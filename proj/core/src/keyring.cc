#include "tulip/keyring.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tulip/crypto.h"
#include "tulip/error.h"

namespace tulip {

SigningKeyring::SigningKeyring(std::string active_key_id, std::map<std::string, Bytes> keys)
    : active_key_id_(std::move(active_key_id)), keys_(std::move(keys)) {
  if (active_key_id_.empty()) throw KeyError("keyring: empty active key id");
  if (!keys_.contains(active_key_id_)) {
    throw KeyError("keyring: active key '" + active_key_id_ + "' not present");
  }
  for (const auto& [kid, key] : keys_) {
    if (key.size() < kMinKeyBytes) {
      throw KeyError("keyring: key '" + kid + "' shorter than 256 bits");
    }
  }
}

SigningKeyring SigningKeyring::generate(const std::string& key_id) {
  return SigningKeyring(key_id, {{key_id, random_bytes(kMinKeyBytes)}});
}

SigningKeyring SigningKeyring::rotated(const std::string& key_id, Bytes key) const {
  auto keys = keys_;
  keys[key_id] = std::move(key);
  return SigningKeyring(key_id, std::move(keys));
}

const Bytes& SigningKeyring::active_key() const { return keys_.at(active_key_id_); }

const Bytes* SigningKeyring::find(const std::string& key_id) const {
  auto it = keys_.find(key_id);
  return it == keys_.end() ? nullptr : &it->second;
}

SigningKeyring SigningKeyring::from_json(const std::string& text) {
  auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw KeyError("keyring: not a JSON object");
  if (!doc.contains("active") || !doc["active"].is_string()) {
    throw KeyError("keyring: missing string field 'active'");
  }
  if (!doc.contains("keys") || !doc["keys"].is_object()) {
    throw KeyError("keyring: missing object field 'keys'");
  }
  std::map<std::string, Bytes> keys;
  for (const auto& [kid, value] : doc["keys"].items()) {
    if (!value.is_string()) throw KeyError("keyring: key '" + kid + "' is not a string");
    auto decoded = base64url_decode(value.get<std::string>());
    if (!decoded) throw KeyError("keyring: key '" + kid + "' is not base64url");
    keys.emplace(kid, std::move(*decoded));
  }
  return SigningKeyring(doc["active"].get<std::string>(), std::move(keys));
}

SigningKeyring SigningKeyring::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KeyError("keyring: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string SigningKeyring::to_json() const {
  nlohmann::json doc;
  doc["active"] = active_key_id_;
  doc["keys"] = nlohmann::json::object();
  for (const auto& [kid, key] : keys_) doc["keys"][kid] = base64url_encode(key);
  return doc.dump(2);
}

}  // namespace tulip
