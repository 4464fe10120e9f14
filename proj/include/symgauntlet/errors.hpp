#pragma once

#include <stdexcept>
#include <string>

namespace symgauntlet {

/// Bad harness setup: missing credential, malformed template, bad descriptor.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Remote call failed after the retry budget was exhausted.
class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, int last_status)
      : std::runtime_error(what), last_status_(last_status) {}

  /// Last HTTP status seen, or 0 when the failure was below HTTP.
  int last_status() const { return last_status_; }

 private:
  int last_status_ = 0;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace symgauntlet
