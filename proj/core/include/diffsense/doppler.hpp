#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "diffsense/common.hpp"
#include "diffsense/differential.hpp"

namespace diffsense {

// ---------------------------------------------------------------------------
// Timestamp calibration
// ---------------------------------------------------------------------------

/// Linear time-scaling factor k_t.
struct TimeCalibration {
  double k_t = 1.0;
};

/// k_t = theoretical / measured. Both durations must be positive.
TimeCalibration estimate_k_t(double theoretical_duration_s, double measured_duration_s);

/// k_t from a recorded duty ratio (retained / true time).
TimeCalibration k_t_from_duty_ratio(double duty_ratio);

/// t_cal = k_t * t; values are left untouched.
RelativeChannelSeries calibrate_timestamps(RelativeChannelSeries series,
                                           const TimeCalibration& calibration);

/// Measures how long one leg of a to-and-fro motion lasts on the series' own
/// time axis. Leg boundaries are the turning points of the unwrapped phase
/// (where the Doppler sign flips); the result is the median spacing of
/// interior turning points. `min_excursion_rad` is the phase swing a leg
/// must cover to count. Throws EmptyResultError if fewer than two interior
/// turning points are found.
double measure_motion_leg_duration(const RelativeChannelSeries& series,
                                   double min_excursion_rad = 4.0 * kPi,
                                   double smoothing_s = 0.05);

// ---------------------------------------------------------------------------
// Non-uniform STFT
// ---------------------------------------------------------------------------

enum class WindowKind { Hann, Gaussian, Rect };

/// w(offset) for a window of total support `span` centered at 0; zero
/// outside (-span/2, span/2). The Gaussian uses sigma = span / 6.
double window_weight(WindowKind kind, double offset_s, double span_s);

/// Symmetric grid -max, -max + step, ..., +max.
std::vector<double> doppler_grid(double max_abs_hz, double step_hz);

struct StftParams {
  WindowKind window = WindowKind::Hann;
  double window_span_s = 1.0;
  double hop_s = 0.1;
  std::vector<double> doppler_grid_hz = doppler_grid(15.0, 0.05);
  bool normalize = true;  // divide each column by the sum of its window weights

  void validate() const;
};

/// S(tau, f_d), rows = analysis times, columns = Doppler bins.
struct DopplerSpectrogram {
  std::vector<double> times_s;
  std::vector<double> frequencies_hz;
  std::vector<Complex> values;       // row-major, times x frequencies
  std::vector<bool> low_support;     // per analysis time

  std::size_t rows() const noexcept { return times_s.size(); }
  std::size_t cols() const noexcept { return frequencies_hz.size(); }
  Complex at(std::size_t row, std::size_t col) const { return values[row * cols() + col]; }
  std::span<const Complex> row(std::size_t r) const {
    return std::span<const Complex>(values).subspan(r * cols(), cols());
  }
};

inline constexpr double kDbFloor = -120.0;

/// 20 log10 |x|, clamped at floor_db.
double magnitude_db(Complex x, double floor_db = kDbFloor);

/// Direct evaluation of
///   S(tau, f) = sum_i H(t_i) w(t_i - tau) e^{-j 2 pi f t_i}
/// with tau = t_0, t_0 + hop, ... up to the last timestamp. Samples outside
/// the window support are skipped. A column is flagged low-support when
/// fewer than two samples carry weight or any stretch of the window longer
/// than half its span holds no sample.
DopplerSpectrogram nu_stft(const RelativeChannelSeries& series, const StftParams& params);

/// Magnitude of the transform over the whole series with a rectangular
/// window, normalized by the sample count.
std::vector<double> global_doppler_spectrum(const RelativeChannelSeries& series,
                                            std::span<const double> doppler_grid_hz);

// ---------------------------------------------------------------------------
// Peaks and velocity
// ---------------------------------------------------------------------------

struct DopplerPeak {
  double time_s = 0.0;
  double frequency_hz = 0.0;
  double magnitude = 0.0;
};

struct PeakOptions {
  bool per_column = true;
  std::size_t max_peaks = 1;  // local maxima per column, strongest first
  /// Keep only peaks at least this far above the column median (dB).
  std::optional<double> min_above_median_db;
  bool skip_low_support = true;
};

/// Per column (or over the whole grid) the strongest local maxima along the
/// Doppler axis. With max_peaks == 1 this is the column argmax.
std::vector<DopplerPeak> peak_doppler(const DopplerSpectrogram& spectrogram,
                                      const PeakOptions& options = {});

double wavelength(double center_frequency_hz);

/// v = f_d * lambda / 2.
double doppler_to_velocity(double doppler_hz, double center_frequency_hz);

}  // namespace diffsense
