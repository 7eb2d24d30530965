#pragma once

#include <stdexcept>
#include <string>

namespace aesimc {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AddressOutOfRange : public Error {
 public:
  using Error::Error;
};

class ValueOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Sense amplifier XOR requested with an unloaded capacitor or latch slot.
class UninitializedSense : public Error {
 public:
  using Error::Error;
};

/// Writeback requested with nothing staged in the row buffer.
class EmptyBuffer : public Error {
 public:
  using Error::Error;
};

class InvalidRound : public Error {
 public:
  using Error::Error;
};

/// Lane pair used in the wrong state (load while a block is resident, or
/// readout with nothing resident).
class LaneBusy : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class UnknownBaseline : public Error {
 public:
  using Error::Error;
};

/// Malformed hex text in an input file.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace aesimc
