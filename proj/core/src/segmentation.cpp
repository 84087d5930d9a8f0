#include "diffsense/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "diffsense/errors.hpp"

namespace diffsense {

void SegmentationParams::validate() const {
  if (!std::isfinite(start_threshold) || !std::isfinite(end_threshold) || end_threshold < 0.0) {
    throw InvalidArgument("thresholds must be finite and non-negative");
  }
  if (end_threshold > start_threshold) {
    throw InvalidArgument("end threshold must not exceed the start threshold");
  }
  if (end_count == 0) throw InvalidArgument("end count must be at least 1");
  if (!(percentile > 0.0) || percentile > 100.0) {
    throw InvalidArgument("percentile must lie in (0, 100]");
  }
}

SegmentationParams adaptive_segmentation_params(std::span<const ComplexF> reference,
                                                const AdaptiveThresholds& adaptive,
                                                std::size_t end_count, double percentile) {
  const std::size_t n = std::min(adaptive.noise_prefix, reference.size());
  if (n == 0) throw InvalidArgument("adaptive thresholds need a non-empty noise prefix");

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(reference[i]);
    sum += a;
    sum_sq += a * a;
  }
  const double mean = sum / static_cast<double>(n);
  const double sd = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean));

  // A silent (noise-free) prefix gives zero thresholds; fall back to a small
  // fraction of the strong-signal level so frames can still close.
  const std::size_t stride = std::max<std::size_t>(1, reference.size() / 1'000'000);
  std::vector<float> amps;
  amps.reserve(reference.size() / stride + 1);
  for (std::size_t i = 0; i < reference.size(); i += stride) amps.push_back(std::abs(reference[i]));
  const auto p99 = amps.begin() + static_cast<std::ptrdiff_t>(amps.size() * 99 / 100);
  std::nth_element(amps.begin(), p99, amps.end());
  const double floor = 0.01 * static_cast<double>(*p99);

  SegmentationParams p;
  p.end_threshold = std::max(mean + adaptive.end_sigmas * sd, floor);
  p.start_threshold = std::max(mean + adaptive.start_sigmas * sd, 2.0 * floor);
  p.start_threshold = std::max(p.start_threshold, p.end_threshold);
  p.end_count = end_count;
  p.percentile = percentile;
  p.validate();
  return p;
}

void FrameTable::validate(std::size_t stream_length) const {
  if (starts.size() != durations.size()) {
    throw InvalidArgument("frame table columns differ in length");
  }
  std::size_t next_free = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (durations[i] == 0) throw InvalidArgument("frame duration must be positive");
    if (starts[i] < next_free) throw InvalidArgument("frames overlap or are out of order");
    if (starts[i] + durations[i] > stream_length) {
      throw InvalidArgument("frame extends past the end of the stream");
    }
    next_free = starts[i] + durations[i];
  }
}

namespace {

template <typename T>
FrameTable detect(std::span<const std::complex<T>> x, const SegmentationParams& params) {
  params.validate();
  FrameTable table;
  bool open = false;
  std::size_t start = 0;
  std::size_t below = 0;
  for (std::size_t idx = 0; idx < x.size(); ++idx) {
    const double a = std::abs(x[idx]);
    if (!open) {
      if (a > params.start_threshold) {
        open = true;
        start = idx;
        below = 0;
      }
      continue;
    }
    if (a < params.end_threshold) {
      if (++below >= params.end_count) {
        const std::size_t end = idx - params.end_count + 1;
        table.starts.push_back(start);
        table.durations.push_back(end - start);
        open = false;
      }
    } else {
      below = 0;
    }
  }
  if (open) {
    table.starts.push_back(start);
    table.durations.push_back(x.size() - below - start);
  }
  return table;
}

}  // namespace

FrameTable detect_frames(std::span<const ComplexF> reference, const SegmentationParams& params) {
  return detect(reference, params);
}

FrameTable detect_frames(std::span<const Complex> reference, const SegmentationParams& params) {
  return detect(reference, params);
}

std::size_t uniform_window_size(std::span<const std::size_t> durations, double percentile) {
  if (!(percentile > 0.0) || percentile > 100.0) {
    throw InvalidArgument("percentile must lie in (0, 100]");
  }
  if (durations.empty()) throw EmptyResultError("no frames detected");
  std::vector<std::size_t> sorted(durations.begin(), durations.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(percentile * n / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

AlignedFrameSet align_frames(const IQRecording& recording, const FrameTable& table,
                             std::size_t window_size) {
  if (window_size == 0) throw InvalidArgument("window size must be positive");
  if (recording.channel1.size() != recording.channel2.size()) {
    throw InvalidArgument("channels differ in length");
  }
  if (!(recording.sample_rate_hz > 0.0)) throw InvalidArgument("sample rate must be positive");
  table.validate(recording.size());

  AlignedFrameSet set;
  set.window_size = window_size;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.durations[i] < window_size) {
      ++set.discarded;
      continue;
    }
    const std::size_t s = table.starts[i];
    AlignedFrame f;
    f.start_index = s;
    f.start_time_s = static_cast<double>(s) / recording.sample_rate_hz;
    f.channel1.assign(recording.channel1.begin() + s, recording.channel1.begin() + s + window_size);
    f.channel2.assign(recording.channel2.begin() + s, recording.channel2.begin() + s + window_size);
    set.frames.push_back(std::move(f));
  }
  return set;
}

}  // namespace diffsense
