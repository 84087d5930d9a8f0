#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "diffsense/common.hpp"
#include "diffsense/recording.hpp"

namespace diffsense {

inline constexpr std::size_t kDefaultEndCount = 16;
inline constexpr double kDefaultPercentile = 5.0;

/// Dual-threshold energy detector settings.
struct SegmentationParams {
  double start_threshold = 0.5;  // a frame opens when |r1| > start
  double end_threshold = 0.3;    // ... and closes after end_count samples < end
  std::size_t end_count = kDefaultEndCount;
  double percentile = kDefaultPercentile;  // x_p for the uniform window

  /// Requires end <= start, end_count >= 1 and 0 < percentile <= 100.
  void validate() const;
};

/// Thresholds derived from the amplitude statistics of a noise-only prefix:
/// start = mean + start_sigmas * std, end = mean + end_sigmas * std.
struct AdaptiveThresholds {
  std::size_t noise_prefix = 4096;
  double start_sigmas = 6.0;
  double end_sigmas = 3.0;
};

SegmentationParams adaptive_segmentation_params(std::span<const ComplexF> reference,
                                                const AdaptiveThresholds& adaptive,
                                                std::size_t end_count = kDefaultEndCount,
                                                double percentile = kDefaultPercentile);

/// Frame start indices and durations, both in samples.
struct FrameTable {
  std::vector<std::size_t> starts;
  std::vector<std::size_t> durations;

  std::size_t size() const noexcept { return starts.size(); }
  bool empty() const noexcept { return starts.empty(); }

  /// Ordered, non-overlapping, and inside [0, stream_length).
  void validate(std::size_t stream_length) const;
};

/// Scans the reference channel once. A frame opens at the first sample with
/// amplitude above the start threshold and closes once end_count consecutive
/// samples fall below the end threshold; the frame end is backed up to the
/// first of those samples. A frame still open at the end of the stream is
/// closed there, excluding any trailing sub-threshold run.
FrameTable detect_frames(std::span<const ComplexF> reference, const SegmentationParams& params);
FrameTable detect_frames(std::span<const Complex> reference, const SegmentationParams& params);

/// Nearest-rank percentile of the durations: the ceil(p/100 * n)-th
/// smallest value.
std::size_t uniform_window_size(std::span<const std::size_t> durations, double percentile);

struct AlignedFrame {
  std::size_t start_index = 0;
  double start_time_s = 0.0;
  std::vector<Complex> channel1;
  std::vector<Complex> channel2;
};

struct AlignedFrameSet {
  std::size_t window_size = 0;
  std::vector<AlignedFrame> frames;
  std::size_t discarded = 0;  // frames shorter than window_size
};

/// Keeps the first window_size samples of every frame at least that long,
/// from both channels at the same indices; start times are index * T_s.
AlignedFrameSet align_frames(const IQRecording& recording, const FrameTable& table,
                             std::size_t window_size);

}  // namespace diffsense
