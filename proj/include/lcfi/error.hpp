#pragma once

#include <stdexcept>
#include <string>

namespace lcfi {

// Root of every exception the library throws across a module boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration value; key() is the YAML key path ("option[0].variable_name").
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace lcfi
