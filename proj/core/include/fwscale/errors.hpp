#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fwscale {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two elements (or measures) from different concrete undergroups were mixed.
class MixedUndergroup : public Error {
 public:
  MixedUndergroup() : Error("elements belong to different undergroups") {}
};

// A composition that had to succeed was undefined (B and C overlap).
class UndefinedComposition : public Error {
 public:
  explicit UndefinedComposition(const std::string& where)
      : Error("composition undefined: " + where) {}
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class PitchMismatch : public Error {
 public:
  using Error::Error;
};

class NotTwoAtomic : public Error {
 public:
  using Error::Error;
};

class CapExceeded : public Error {
 public:
  using Error::Error;
};

class ZeroFunctional : public Error {
 public:
  ZeroFunctional() : Error("functional has zero mean square") {}
};

class UnknownModel : public Error {
 public:
  explicit UnknownModel(const std::string& name)
      : Error("unknown model: " + name) {}
};

class InsufficientLevels : public Error {
 public:
  using Error::Error;
};

// Raised by config validation; carries every violated field.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

}  // namespace fwscale
