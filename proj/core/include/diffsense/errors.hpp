#pragma once

#include <stdexcept>
#include <string>

namespace diffsense {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition or domain violation in a call argument.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configuration value failed validation. `field()` is a dotted path
/// such as "tx.burst_duration_s.min".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Reading or writing an IQ recording failed.
class RecordingError : public Error {
 public:
  enum class Kind { MetadataMissing, MalformedHeader, LengthMismatch, TruncatedData, Io };

  RecordingError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Writing an output file or directory failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A processing artifact (spectrogram CSV, manifest) could not be parsed.
class ArtifactError : public Error {
 public:
  using Error::Error;
};

/// The pipeline produced nothing to work with (no frames, no usable frames).
class EmptyResultError : public Error {
 public:
  using Error::Error;
};

}  // namespace diffsense
