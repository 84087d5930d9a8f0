#include "diffsense/doppler.hpp"

#include <algorithm>
#include <cmath>

#include "diffsense/errors.hpp"

namespace diffsense {

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

TimeCalibration estimate_k_t(double theoretical_duration_s, double measured_duration_s) {
  if (!(theoretical_duration_s > 0.0) || !std::isfinite(theoretical_duration_s) ||
      !(measured_duration_s > 0.0) || !std::isfinite(measured_duration_s)) {
    throw InvalidArgument("calibration durations must be positive");
  }
  return {theoretical_duration_s / measured_duration_s};
}

TimeCalibration k_t_from_duty_ratio(double duty_ratio) {
  if (!(duty_ratio > 0.0) || duty_ratio > 1.0) {
    throw InvalidArgument("duty ratio must lie in (0, 1]");
  }
  return {1.0 / duty_ratio};
}

RelativeChannelSeries calibrate_timestamps(RelativeChannelSeries series,
                                           const TimeCalibration& calibration) {
  if (!(calibration.k_t > 0.0) || !std::isfinite(calibration.k_t)) {
    throw InvalidArgument("k_t must be positive");
  }
  for (auto& t : series.timestamps_s) t *= calibration.k_t;
  return series;
}

namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

}  // namespace

double measure_motion_leg_duration(const RelativeChannelSeries& series, double min_excursion_rad,
                                   double smoothing_s) {
  series.validate();
  if (!(min_excursion_rad > 0.0) || !(smoothing_s >= 0.0)) {
    throw InvalidArgument("excursion must be positive and smoothing non-negative");
  }
  const std::size_t n = series.size();
  if (n < 3) throw EmptyResultError("series too short to find turning points");
  const auto& t = series.timestamps_s;

  std::vector<double> phase(n);
  phase[0] = std::arg(series.values[0]);
  for (std::size_t i = 1; i < n; ++i) {
    const double d = std::remainder(std::arg(series.values[i]) - std::arg(series.values[i - 1]),
                                    kTwoPi);
    phase[i] = phase[i - 1] + d;
  }

  // Centered moving average over +/- smoothing_s / 2.
  std::vector<double> smooth(n);
  {
    std::size_t lo = 0, hi = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      while (hi < n && t[hi] <= t[i] + smoothing_s / 2) sum += phase[hi++];
      while (t[lo] < t[i] - smoothing_s / 2) sum -= phase[lo++];
      smooth[i] = sum / static_cast<double>(hi - lo);
    }
  }

  // Zigzag with hysteresis: an extreme is confirmed once the signal has
  // moved min_excursion_rad away from it.
  std::vector<std::size_t> extremes;
  int dir = 0;
  std::size_t hi_i = 0, lo_i = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (smooth[i] > smooth[hi_i]) hi_i = i;
    if (smooth[i] < smooth[lo_i]) lo_i = i;
    if (dir >= 0 && smooth[hi_i] - smooth[i] >= min_excursion_rad) {
      extremes.push_back(hi_i);
      dir = -1;
      lo_i = i;
    } else if (dir <= 0 && smooth[i] - smooth[lo_i] >= min_excursion_rad) {
      extremes.push_back(lo_i);
      dir = 1;
      hi_i = i;
    }
  }
  // The first confirmed extreme is where the first leg starts, not a reversal.
  if (extremes.size() < 3) {
    throw EmptyResultError("fewer than two motion reversals found");
  }
  std::vector<double> spacing;
  for (std::size_t k = 2; k < extremes.size(); ++k) {
    spacing.push_back(t[extremes[k]] - t[extremes[k - 1]]);
  }
  return median(std::move(spacing));
}

// ---------------------------------------------------------------------------
// STFT
// ---------------------------------------------------------------------------

double window_weight(WindowKind kind, double offset_s, double span_s) {
  if (!(span_s > 0.0)) throw InvalidArgument("window span must be positive");
  if (std::abs(offset_s) >= span_s / 2) return 0.0;
  switch (kind) {
    case WindowKind::Hann:
      return 0.5 * (1.0 + std::cos(kTwoPi * offset_s / span_s));
    case WindowKind::Gaussian: {
      const double z = offset_s / (span_s / 6.0);
      return std::exp(-0.5 * z * z);
    }
    case WindowKind::Rect:
      return 1.0;
  }
  return 0.0;
}

std::vector<double> doppler_grid(double max_abs_hz, double step_hz) {
  if (!(max_abs_hz >= 0.0) || !(step_hz > 0.0) || !std::isfinite(max_abs_hz)) {
    throw InvalidArgument("Doppler grid needs max >= 0 and step > 0");
  }
  const auto n = static_cast<long>(std::floor(max_abs_hz / step_hz + 1e-9));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(2 * n + 1));
  for (long i = -n; i <= n; ++i) grid.push_back(static_cast<double>(i) * step_hz);
  return grid;
}

void StftParams::validate() const {
  if (!(window_span_s > 0.0) || !std::isfinite(window_span_s)) {
    throw InvalidArgument("window span must be positive");
  }
  if (!(hop_s > 0.0) || !std::isfinite(hop_s)) throw InvalidArgument("hop must be positive");
  if (doppler_grid_hz.empty()) throw InvalidArgument("Doppler grid is empty");
  for (double f : doppler_grid_hz) {
    if (!std::isfinite(f)) throw InvalidArgument("Doppler grid has a non-finite entry");
  }
}

double magnitude_db(Complex x, double floor_db) {
  const double m = std::abs(x);
  if (m == 0.0) return floor_db;
  return std::max(20.0 * std::log10(m), floor_db);
}

namespace {

// Accumulates sum_i a_i e^{-j 2 pi f t_i} over a frequency grid. Uniform
// grids advance each phasor by a constant rotation and re-anchor it every
// kAnchor bins to bound rounding growth.
class DtftAccumulator {
 public:
  explicit DtftAccumulator(std::span<const double> grid) : grid_(grid), acc_(grid.size()) {
    if (grid.size() >= 2) {
      step_ = grid[1] - grid[0];
      uniform_ = step_ != 0.0;
      for (std::size_t k = 1; uniform_ && k < grid.size(); ++k) {
        const double expected = grid[0] + static_cast<double>(k) * step_;
        uniform_ = std::abs(grid[k] - expected) <= 1e-9 * std::max(1.0, std::abs(expected));
      }
    }
  }

  void reset() { std::fill(acc_.begin(), acc_.end(), Complex{}); }

  void add(Complex a, double t) {
    const std::size_t m = grid_.size();
    if (!uniform_) {
      for (std::size_t k = 0; k < m; ++k) acc_[k] += a * std::polar(1.0, -kTwoPi * grid_[k] * t);
      return;
    }
    const Complex rot = std::polar(1.0, -kTwoPi * step_ * t);
    Complex p;
    for (std::size_t k = 0; k < m; ++k) {
      if (k % kAnchor == 0) {
        p = a * std::polar(1.0, -kTwoPi * grid_[k] * t);
      } else {
        p *= rot;
      }
      acc_[k] += p;
    }
  }

  const std::vector<Complex>& values() const { return acc_; }

 private:
  static constexpr std::size_t kAnchor = 64;
  std::span<const double> grid_;
  std::vector<Complex> acc_;
  double step_ = 0.0;
  bool uniform_ = false;
};

}  // namespace

DopplerSpectrogram nu_stft(const RelativeChannelSeries& series, const StftParams& params) {
  params.validate();
  series.validate();
  if (series.empty()) throw InvalidArgument("cannot transform an empty series");

  const auto& t = series.timestamps_s;
  const double half = params.window_span_s / 2;
  DopplerSpectrogram out;
  out.frequencies_hz = params.doppler_grid_hz;
  for (long m = 0;; ++m) {
    const double tau = t.front() + static_cast<double>(m) * params.hop_s;
    if (tau > t.back() + 1e-9 * params.hop_s) break;
    out.times_s.push_back(tau);
  }
  out.values.reserve(out.rows() * out.cols());
  out.low_support.reserve(out.rows());

  DtftAccumulator acc(out.frequencies_hz);
  std::size_t first = 0;
  for (double tau : out.times_s) {
    while (first < t.size() && t[first] - tau <= -half) ++first;
    acc.reset();
    double weight_sum = 0.0;
    std::size_t support = 0;
    double prev = tau - half;
    double widest_gap = 0.0;
    std::size_t i = first;
    for (; i < t.size() && t[i] - tau < half; ++i) {
      const double w = window_weight(params.window, t[i] - tau, params.window_span_s);
      widest_gap = std::max(widest_gap, t[i] - prev);
      prev = t[i];
      if (w <= 0.0) continue;
      acc.add(series.values[i] * w, t[i]);
      weight_sum += w;
      ++support;
    }
    widest_gap = std::max(widest_gap, tau + half - prev);
    out.low_support.push_back(support < 2 || widest_gap > half);
    const double scale = params.normalize && weight_sum > 0.0 ? 1.0 / weight_sum : 1.0;
    for (const Complex& v : acc.values()) out.values.push_back(v * scale);
  }
  return out;
}

std::vector<double> global_doppler_spectrum(const RelativeChannelSeries& series,
                                            std::span<const double> doppler_grid_hz) {
  series.validate();
  if (series.empty()) throw InvalidArgument("cannot transform an empty series");
  DtftAccumulator acc(doppler_grid_hz);
  for (std::size_t i = 0; i < series.size(); ++i) acc.add(series.values[i], series.timestamps_s[i]);
  std::vector<double> out;
  out.reserve(doppler_grid_hz.size());
  const double n = static_cast<double>(series.size());
  for (const Complex& v : acc.values()) out.push_back(std::abs(v) / n);
  return out;
}

// ---------------------------------------------------------------------------
// Peaks
// ---------------------------------------------------------------------------

namespace {

// Local maxima along one column, strongest first; ties keep grid order.
std::vector<std::size_t> local_maxima(const std::vector<double>& mag) {
  std::vector<std::size_t> idx;
  const std::size_t n = mag.size();
  for (std::size_t k = 0; k < n; ++k) {
    const bool left = k == 0 || mag[k] > mag[k - 1];
    const bool right = k + 1 == n || mag[k] >= mag[k + 1];
    if (left && right && mag[k] > 0.0) idx.push_back(k);
  }
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
  return idx;
}

}  // namespace

std::vector<DopplerPeak> peak_doppler(const DopplerSpectrogram& spectrogram,
                                      const PeakOptions& options) {
  if (options.max_peaks == 0) throw InvalidArgument("max_peaks must be at least 1");
  std::vector<DopplerPeak> all;
  for (std::size_t r = 0; r < spectrogram.rows(); ++r) {
    if (options.skip_low_support && r < spectrogram.low_support.size() &&
        spectrogram.low_support[r]) {
      continue;
    }
    std::vector<double> mag(spectrogram.cols());
    for (std::size_t c = 0; c < mag.size(); ++c) mag[c] = std::abs(spectrogram.at(r, c));
    std::vector<std::size_t> idx;
    if (options.max_peaks == 1) {
      const auto it = std::max_element(mag.begin(), mag.end());
      if (it != mag.end() && *it > 0.0) idx.push_back(static_cast<std::size_t>(it - mag.begin()));
    } else {
      idx = local_maxima(mag);
    }
    double floor = 0.0;
    if (options.min_above_median_db) {
      floor = median(mag) * std::pow(10.0, *options.min_above_median_db / 20.0);
    }
    std::size_t kept = 0;
    for (std::size_t k : idx) {
      if (options.per_column && kept == options.max_peaks) break;
      if (options.min_above_median_db && mag[k] < floor) continue;
      all.push_back({spectrogram.times_s[r], spectrogram.frequencies_hz[k], mag[k]});
      ++kept;
    }
  }
  if (!options.per_column) {
    std::stable_sort(all.begin(), all.end(), [](const DopplerPeak& a, const DopplerPeak& b) {
      return a.magnitude > b.magnitude;
    });
    if (all.size() > options.max_peaks) all.resize(options.max_peaks);
  }
  return all;
}

double wavelength(double center_frequency_hz) {
  if (!(center_frequency_hz > 0.0) || !std::isfinite(center_frequency_hz)) {
    throw InvalidArgument("center frequency must be positive");
  }
  return kSpeedOfLight / center_frequency_hz;
}

double doppler_to_velocity(double doppler_hz, double center_frequency_hz) {
  return doppler_hz * wavelength(center_frequency_hz) / 2.0;
}

}  // namespace diffsense
