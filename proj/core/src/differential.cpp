#include "diffsense/differential.hpp"

#include <algorithm>
#include <cmath>

#include "diffsense/errors.hpp"

namespace diffsense {

long symmetric_bin_index(std::size_t k, std::size_t n) {
  if (k >= n) throw InvalidArgument("bin index out of range");
  return k <= n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

std::vector<Complex> frame_spectrum(std::span<const Complex> window, std::size_t window_size) {
  if (window_size == 0 || window.size() != window_size) {
    throw InvalidArgument("frame length does not match the window size");
  }
  return fft(window);
}

RelativeChannel relative_channel(const FrameSpectrumPair& pair, double null_guard) {
  const std::size_t n = pair.size();
  if (n == 0 || pair.sensing.size() != n) {
    throw InvalidArgument("spectra must be non-empty and of equal length");
  }
  if (!(null_guard >= 0.0) || !std::isfinite(null_guard)) {
    throw InvalidArgument("null guard must be finite and non-negative");
  }
  std::vector<double> mags(n);
  for (std::size_t k = 0; k < n; ++k) mags[k] = std::abs(pair.reference[k]);
  std::vector<double> sorted = mags;
  const auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  double median = *mid;
  if (n % 2 == 0) median = 0.5 * (median + *std::max_element(sorted.begin(), mid));
  const double threshold = null_guard * median;

  RelativeChannel rel;
  rel.ratio.assign(n, Complex{});
  rel.included.assign(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    if (mags[k] == 0.0 || mags[k] < threshold) continue;
    rel.ratio[k] = pair.sensing[k] / pair.reference[k];
    rel.included[k] = true;
    ++rel.included_count;
  }
  return rel;
}

Complex spectral_average(const RelativeChannel& rel) {
  if (!rel.usable()) throw InvalidArgument("no bin survived the null guard");
  Complex sum{};
  for (std::size_t k = 0; k < rel.ratio.size(); ++k) {
    if (rel.included[k]) sum += rel.ratio[k];
  }
  return sum / static_cast<double>(rel.included_count);
}

void RelativeChannelSeries::validate() const {
  if (timestamps_s.size() != values.size()) {
    throw InvalidArgument("series timestamps and values differ in length");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(timestamps_s[i]) || !std::isfinite(values[i].real()) ||
        !std::isfinite(values[i].imag())) {
      throw InvalidArgument("series contains a non-finite entry");
    }
    if (i > 0 && !(timestamps_s[i] > timestamps_s[i - 1])) {
      throw InvalidArgument("series timestamps must be strictly increasing");
    }
  }
}

namespace {

Complex temporal_mean(const std::vector<Complex>& values) {
  Complex sum{};
  for (const auto& v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

RelativeChannelSeries subtract_temporal_mean(RelativeChannelSeries series) {
  if (series.empty()) throw InvalidArgument("cannot remove the mean of an empty series");
  const Complex mean = temporal_mean(series.values);
  for (auto& v : series.values) v -= mean;
  series.mean_removed = true;
  return series;
}

DifferentialResult compute_differential_series(const AlignedFrameSet& frames,
                                               const DifferentialOptions& options) {
  if (frames.frames.empty()) throw InvalidArgument("no aligned frames");
  const std::size_t w = frames.window_size;
  if (w == 0) throw InvalidArgument("window size must be positive");

  FftPlan plan(w, FftDirection::Forward);
  FrameSpectrumPair pair;
  pair.reference.resize(w);
  pair.sensing.resize(w);

  DifferentialResult result;
  for (const AlignedFrame& f : frames.frames) {
    if (f.channel1.size() != w || f.channel2.size() != w) {
      throw InvalidArgument("frame length does not match the window size");
    }
    plan.execute(f.channel1, pair.reference);
    plan.execute(f.channel2, pair.sensing);
    const RelativeChannel rel = relative_channel(pair, options.null_guard);
    if (!rel.usable()) {
      ++result.unusable_frames;
      continue;
    }
    result.series.timestamps_s.push_back(f.start_time_s);
    result.series.values.push_back(spectral_average(rel));
  }
  if (result.series.empty()) throw EmptyResultError("every frame was unusable");
  result.static_baseline = temporal_mean(result.series.values);
  for (auto& v : result.series.values) v -= result.static_baseline;
  result.series.mean_removed = true;
  return result;
}

}  // namespace diffsense
