#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diffsense/common.hpp"

namespace diffsense {

/// Two coherent receive channels sampled on a shared clock.
///
/// channel1 is the reference receiver (oriented toward the transmitter),
/// channel2 the sensing receiver. Samples are stored as 32-bit floats so a
/// recording maps one-to-one onto its on-disk form.
struct IQRecording {
  std::vector<ComplexF> channel1;
  std::vector<ComplexF> channel2;
  double sample_rate_hz = 0.0;
  double center_frequency_hz = 0.0;
  nlohmann::json metadata = nlohmann::json::object();

  std::size_t size() const noexcept { return channel1.size(); }
  double sample_period() const { return 1.0 / sample_rate_hz; }
  double duration() const { return static_cast<double>(size()) / sample_rate_hz; }

  /// Throws InvalidArgument unless both channels have equal length, the
  /// sample rate is positive and every sample is finite.
  void validate() const;
};

bool operator==(const IQRecording& a, const IQRecording& b);

// On-disk layout: one JSON sidecar plus one raw file per channel.
//
//   recording.json      {"format": "cf32le", "sample_rate_hz": ...,
//                        "center_freq_hz": ..., "channel_files": [..., ...],
//                        "sample_count": ..., "metadata": {...}}
//   recording.ch1.cf32  interleaved little-endian float32 I,Q,I,Q,...
//   recording.ch2.cf32
//
// Channel file names are stored relative to the sidecar.

inline constexpr const char* kRecordingFormat = "cf32le";

/// Resolves `path` to a sidecar: a directory maps to <dir>/recording.json.
std::filesystem::path recording_sidecar_path(const std::filesystem::path& path);

void write_recording(const IQRecording& recording, const std::filesystem::path& path);

/// Throws RecordingError with kind MetadataMissing, MalformedHeader,
/// LengthMismatch, TruncatedData or Io.
IQRecording read_recording(const std::filesystem::path& path);

// Raw cf32 helpers, exposed for the spectrogram dump.
void write_cf32(const std::filesystem::path& path, const std::vector<ComplexF>& samples);
std::vector<ComplexF> read_cf32(const std::filesystem::path& path);

}  // namespace diffsense
