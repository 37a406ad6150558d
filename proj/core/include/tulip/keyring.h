#ifndef TULIP_KEYRING_H_
#define TULIP_KEYRING_H_

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "tulip/encoding.h"

namespace tulip {

// Symmetric MAC keys indexed by key id. Minting uses the active key only;
// verification accepts any key present. Instances are immutable once built,
// so rotation means constructing a new keyring and swapping it in whole.
class SigningKeyring {
 public:
  static constexpr std::size_t kMinKeyBytes = 32;

  // Throws KeyError if active_key_id is absent or any key is shorter than
  // kMinKeyBytes.
  SigningKeyring(std::string active_key_id, std::map<std::string, Bytes> keys);

  // A keyring holding one freshly generated 256-bit key.
  static SigningKeyring generate(const std::string& key_id);

  // Returns a copy that also holds `key` under `key_id` and makes it active.
  // Existing keys are retained so previously minted tokens keep verifying.
  SigningKeyring rotated(const std::string& key_id, Bytes key) const;

  // JSON document {"active": "<kid>", "keys": {"<kid>": "<base64url>"}}.
  static SigningKeyring from_json(const std::string& text);
  static SigningKeyring load(const std::string& path);
  std::string to_json() const;

  const std::string& active_key_id() const { return active_key_id_; }
  const Bytes& active_key() const;
  const Bytes* find(const std::string& key_id) const;
  std::size_t size() const { return keys_.size(); }

 private:
  std::string active_key_id_;
  std::map<std::string, Bytes> keys_;
};

// Shared handle to the current keyring. Readers take a snapshot; rotation
// replaces the pointer atomically.
class KeyringHolder {
 public:
  explicit KeyringHolder(SigningKeyring initial)
      : current_(std::make_shared<const SigningKeyring>(std::move(initial))) {}

  std::shared_ptr<const SigningKeyring> get() const {
    std::lock_guard lock(mu_);
    return current_;
  }

  void replace(SigningKeyring next) {
    auto ptr = std::make_shared<const SigningKeyring>(std::move(next));
    std::lock_guard lock(mu_);
    current_ = std::move(ptr);
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const SigningKeyring> current_;
};

}  // namespace tulip

#endif  // TULIP_KEYRING_H_
