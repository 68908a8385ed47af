#pragma once

#include <stdexcept>
#include <string>

namespace flapguard {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class WindowNotFull : public Error {
 public:
  using Error::Error;
};

class LagOutOfRange : public Error {
 public:
  using Error::Error;
};

class DegenerateWindow : public Error {
 public:
  using Error::Error;
};

class EmptyLagBand : public Error {
 public:
  using Error::Error;
};

class InvalidBand : public Error {
 public:
  using Error::Error;
};

class NonFiniteSample : public Error {
 public:
  using Error::Error;
};

class NotArmed : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class AlgebraicSolveFailed : public Error {
 public:
  using Error::Error;
};

class UnknownObservable : public Error {
 public:
  using Error::Error;
};

}  // namespace flapguard
