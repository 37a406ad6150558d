#ifndef TULIP_ERROR_H_
#define TULIP_ERROR_H_

#include <stdexcept>
#include <string>

namespace tulip {

// Base for every error thrown by the library. Verification failures on
// untrusted input are never thrown; they are returned as values.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or incomplete configuration (service config, user record missing an
// ouid, malformed policy). The server maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Signing key material is missing or unusable.
class KeyError : public Error {
 public:
  using Error::Error;
};

class UnknownUserError : public Error {
 public:
  explicit UnknownUserError(const std::string& username)
      : Error("unknown user: " + username) {}
};

// Persistence failures: I/O errors and schema mismatches on load.
class StoreError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace tulip

#endif  // TULIP_ERROR_H_
