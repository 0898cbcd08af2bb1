#pragma once

#include <stdexcept>
#include <string>

namespace bratteli {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or a value that violates a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed documents; `path` names the offending key.
class FormatError : public Error {
 public:
  FormatError(std::string path, const std::string& what)
      : Error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A construction produced something its own invariants reject.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class FermionUnavailable : public Error {
 public:
  FermionUnavailable(const std::string& what, std::size_t deepest_level)
      : Error(what), deepest_level_(deepest_level) {}
  std::size_t deepest_level() const noexcept { return deepest_level_; }

 private:
  std::size_t deepest_level_;
};

class ConstructionNotFound : public Error {
 public:
  using Error::Error;
};

class UnsupportedClassification : public Error {
 public:
  using Error::Error;
};

}  // namespace bratteli
