#pragma once

#include <stdexcept>
#include <string>

namespace coopgen {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A surrogate evaluated outside its domain (e.g. zero training samples).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Caller broke an operation's precondition.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

/// The game instance cannot be solved as posed (e.g. a non-negative weight z_n).
class InstanceError : public Error {
 public:
  explicit InstanceError(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace coopgen
