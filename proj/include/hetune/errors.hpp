#pragma once

#include <stdexcept>
#include <string>

namespace hetune {

/// Base for all library errors that callers are expected to handle.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rescaling operation was requested on a ciphertext at level 0.
class LevelExhausted : public Error {
 public:
  using Error::Error;
};

/// Operands disagree on level, scale_power or scale.
class OperandMismatch : public Error {
 public:
  using Error::Error;
};

/// A ciphertext or key belongs to a different backend or parameter set.
class BackendMismatch : public Error {
 public:
  using Error::Error;
};

/// A value does not fit the plaintext space without wraparound.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Out-of-order or malformed protocol message.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// A relative update would flip the sign of a controller parameter.
class PositivityViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized data.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetune
