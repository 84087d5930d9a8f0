#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "diffsense/common.hpp"
#include "diffsense/fft.hpp"
#include "diffsense/segmentation.hpp"

namespace diffsense {

inline constexpr double kDefaultNullGuard = 1e-3;

/// Maps DFT bin k (DC first) of an n-point transform onto the symmetric
/// index range (-n/2, n/2].
long symmetric_bin_index(std::size_t k, std::size_t n);

/// Unnormalized forward DFT of one aligned window. Throws InvalidArgument
/// if the window is not window_size samples long.
std::vector<Complex> frame_spectrum(std::span<const Complex> window, std::size_t window_size);

struct FrameSpectrumPair {
  std::vector<Complex> reference;  // R1(f_q), DC first
  std::vector<Complex> sensing;    // R2(f_q), DC first
  double bin_spacing_hz = 0.0;     // 1 / (window_size * T_s)

  std::size_t size() const noexcept { return reference.size(); }
};

/// Per-bin ratio R2/R1. Bins whose reference magnitude falls below
/// null_guard * median|R1| (or is exactly zero) are excluded instead of
/// divided; their ratio entry is left at zero.
struct RelativeChannel {
  std::vector<Complex> ratio;
  std::vector<bool> included;
  std::size_t included_count = 0;

  bool usable() const noexcept { return included_count > 0; }
};

RelativeChannel relative_channel(const FrameSpectrumPair& pair,
                                 double null_guard = kDefaultNullGuard);

/// Arithmetic mean of the included bins. Throws InvalidArgument if no bin
/// is included.
Complex spectral_average(const RelativeChannel& rel);

/// Relative channel samples on a (generally non-uniform) time axis.
struct RelativeChannelSeries {
  std::vector<double> timestamps_s;
  std::vector<Complex> values;
  bool mean_removed = false;

  std::size_t size() const noexcept { return values.size(); }
  bool empty() const noexcept { return values.empty(); }

  /// Equal lengths, finite values, strictly increasing timestamps.
  void validate() const;
};

/// Subtracts the complex temporal mean (sequential, deterministic order).
RelativeChannelSeries subtract_temporal_mean(RelativeChannelSeries series);

struct DifferentialOptions {
  double null_guard = kDefaultNullGuard;
};

struct DifferentialResult {
  RelativeChannelSeries series;      // mean removed
  Complex static_baseline{0.0, 0.0};  // the mean that was subtracted
  std::size_t unusable_frames = 0;
};

/// Per frame: both spectra, the per-bin ratio and its spectral average;
/// then the temporal mean is removed. Unusable frames are dropped. Throws
/// EmptyResultError when every frame is unusable and InvalidArgument for an
/// empty frame set.
DifferentialResult compute_differential_series(const AlignedFrameSet& frames,
                                               const DifferentialOptions& options = {});

}  // namespace diffsense
