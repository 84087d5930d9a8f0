#include <gtest/gtest.h>

#include <random>

#include "diffsense/doppler.hpp"
#include "diffsense/errors.hpp"
#include "diffsense/fft.hpp"
#include "support/oracles.hpp"

using namespace diffsense;

namespace {

constexpr double kFc = 25.1e9;

RelativeChannelSeries jittered_series(std::mt19937_64& rng, std::size_t n, double mean_dt) {
  std::uniform_real_distribution<double> dt(0.2 * mean_dt, 1.8 * mean_dt);
  RelativeChannelSeries s;
  double t = 0.37;
  for (std::size_t i = 0; i < n; ++i) {
    s.timestamps_s.push_back(t);
    t += dt(rng);
  }
  s.values = oracle::random_complex(rng, n);
  return s;
}

void expect_matches_direct_sum(const RelativeChannelSeries& s, const StftParams& p) {
  const DopplerSpectrogram sg = nu_stft(s, p);
  ASSERT_EQ(sg.cols(), p.doppler_grid_hz.size());
  double worst = 0.0, scale = 0.0;
  for (std::size_t r = 0; r < sg.rows(); ++r) {
    for (std::size_t c = 0; c < sg.cols(); ++c) {
      const Complex want = oracle::direct_stft_cell(s.timestamps_s, s.values, sg.times_s[r],
                                                    sg.frequencies_hz[c], p.window_span_s,
                                                    p.normalize);
      worst = std::max(worst, std::abs(sg.at(r, c) - want));
      scale = std::max(scale, std::abs(want));
    }
  }
  EXPECT_LE(worst, 1e-9 * scale);
}

}  // namespace

TEST(Calibration, KtFromDurationsAndDutyRatio) {
  EXPECT_DOUBLE_EQ(estimate_k_t(3.2, 1.9).k_t, 1.6842105263157894);
  EXPECT_DOUBLE_EQ(k_t_from_duty_ratio(0.59375).k_t, 1.6842105263157894);
  EXPECT_THROW(estimate_k_t(3.2, 0.0), InvalidArgument);
  EXPECT_THROW(estimate_k_t(-1.0, 1.0), InvalidArgument);
  EXPECT_THROW(k_t_from_duty_ratio(0.0), InvalidArgument);
  EXPECT_THROW(k_t_from_duty_ratio(1.5), InvalidArgument);
}

TEST(Calibration, ScalesTimestampsOnly) {
  RelativeChannelSeries s;
  s.timestamps_s = {0.0, 0.5, 1.9};
  s.values = {1.0, Complex(0.0, 1.0), -1.0};
  const auto out = calibrate_timestamps(s, TimeCalibration{3.2 / 1.9});
  EXPECT_DOUBLE_EQ(out.timestamps_s[2], 1.9 * (3.2 / 1.9));
  EXPECT_EQ(out.values, s.values);
}

TEST(Calibration, CalibrationMapsApparentDopplerToTrueDoppler) {
  // A 5.23 Hz rotation seen on a time axis compressed by 1.9/3.2 appears
  // at 5.23 * k_t; rescaling the axis restores it.
  const double k_t = 3.2 / 1.9;
  RelativeChannelSeries s;
  for (int i = 0; i < 4000; ++i) {
    const double t = 0.001 * i;
    s.timestamps_s.push_back(t);
    s.values.push_back(std::polar(1.0, oracle::kTwoPi * 5.232786743421010 * k_t * t));
  }
  const auto grid = doppler_grid(15.0, 0.01);
  auto argmax = [&](const RelativeChannelSeries& x) {
    const auto g = global_doppler_spectrum(x, grid);
    return grid[static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin())];
  };
  EXPECT_NEAR(argmax(s), 8.813114515235, 0.01);
  EXPECT_NEAR(argmax(calibrate_timestamps(s, {k_t})), 5.232786743421010, 0.01);
}

TEST(LegDuration, FindsTurningPointsOnJitteredAxis) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> dt(0.0002, 0.0018);
  const double lambda = wavelength(kFc);
  const double leg = 1.9;
  RelativeChannelSeries s;
  for (double t = 0.0; t < 7.6; t += dt(rng)) {
    const double phase_in_leg = std::fmod(t, 2 * leg);
    const double d = 3.3 - 0.0625 * (phase_in_leg < leg ? phase_in_leg : 2 * leg - phase_in_leg);
    s.timestamps_s.push_back(t);
    s.values.push_back(std::polar(0.25, -oracle::kTwoPi * d / lambda) + 0.05);
  }
  EXPECT_NEAR(measure_motion_leg_duration(subtract_temporal_mean(s)), leg, 0.02);
}

TEST(LegDuration, ConstantMotionHasNoReversals) {
  RelativeChannelSeries s;
  for (int i = 0; i < 5000; ++i) {
    s.timestamps_s.push_back(0.001 * i);
    s.values.push_back(std::polar(1.0, oracle::kTwoPi * 5.0 * 0.001 * i));
  }
  EXPECT_THROW(measure_motion_leg_duration(s), EmptyResultError);
}

TEST(Windows, ShapesAndSupport) {
  EXPECT_DOUBLE_EQ(window_weight(WindowKind::Hann, 0.0, 1.0), 1.0);
  EXPECT_NEAR(window_weight(WindowKind::Hann, 0.25, 1.0), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(window_weight(WindowKind::Hann, 0.5, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(window_weight(WindowKind::Hann, -0.6, 1.0), 0.0);
  EXPECT_NEAR(window_weight(WindowKind::Gaussian, 1.0 / 6.0, 1.0), std::exp(-0.5), 1e-15);
  EXPECT_DOUBLE_EQ(window_weight(WindowKind::Rect, 0.49, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(window_weight(WindowKind::Rect, 0.5, 1.0), 0.0);
  EXPECT_THROW(window_weight(WindowKind::Hann, 0.0, 0.0), InvalidArgument);
}

TEST(Grid, SymmetricIntegerMultiples) {
  EXPECT_EQ(doppler_grid(1.0, 0.5), (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
  EXPECT_EQ(doppler_grid(0.3, 0.1).size(), 7u);
  EXPECT_EQ(doppler_grid(15.0, 0.05).size(), 601u);
  EXPECT_EQ(doppler_grid(0.0, 1.0), std::vector<double>{0.0});
  EXPECT_THROW(doppler_grid(1.0, 0.0), InvalidArgument);
}

TEST(NuStft, MatchesDirectSumOnJitteredTimes) {
  std::mt19937_64 rng(42);
  const auto s = jittered_series(rng, 1500, 0.002);
  StftParams p;
  p.window_span_s = 0.4;
  p.hop_s = 0.05;
  p.doppler_grid_hz = doppler_grid(200.0, 2.5);
  expect_matches_direct_sum(s, p);
  p.normalize = false;
  expect_matches_direct_sum(s, p);
}

TEST(NuStft, MatchesDirectSumOnAnIrregularGrid) {
  std::mt19937_64 rng(43);
  const auto s = jittered_series(rng, 800, 0.003);
  StftParams p;
  p.window_span_s = 0.6;
  p.hop_s = 0.1;
  p.doppler_grid_hz = {-97.3, -12.0, 0.0, 0.3, 5.2327867, 44.4, 150.0};
  expect_matches_direct_sum(s, p);
}

TEST(NuStft, LongUniformGridStaysAccurate) {
  // Many bins stress the recurrence used on uniform grids.
  std::mt19937_64 rng(44);
  const auto s = jittered_series(rng, 600, 0.001);
  StftParams p;
  p.window_span_s = 0.128;
  p.hop_s = 0.1;
  p.doppler_grid_hz = doppler_grid(400.0, 0.25);
  expect_matches_direct_sum(s, p);
}

TEST(NuStft, RowsStartAtFirstSampleAndStopAtLast) {
  std::mt19937_64 rng(45);
  const auto s = jittered_series(rng, 500, 0.002);
  StftParams p;
  p.window_span_s = 0.2;
  p.hop_s = 0.1;
  p.doppler_grid_hz = {0.0};
  const auto sg = nu_stft(s, p);
  const double t0 = s.timestamps_s.front(), t1 = s.timestamps_s.back();
  ASSERT_EQ(sg.rows(), static_cast<std::size_t>(std::floor((t1 - t0) / 0.1)) + 1);
  EXPECT_DOUBLE_EQ(sg.times_s.front(), t0);
  EXPECT_LE(sg.times_s.back(), t1);
}

TEST(NuStft, UniformSamplingReducesToWindowedDft) {
  // Rect window holding exactly 63 samples; on the DFT grid of those samples
  // S equals the FFT referenced to the first sample's time.
  const double ts = 0.01;
  const std::size_t n = 63;
  std::mt19937_64 rng(46);
  RelativeChannelSeries s;
  s.values = oracle::random_complex(rng, 200);
  for (std::size_t i = 0; i < 200; ++i) s.timestamps_s.push_back(ts * static_cast<double>(i));
  StftParams p;
  p.window = WindowKind::Rect;
  p.window_span_s = 0.635;
  p.hop_s = 0.1;
  p.normalize = false;
  const double step = 1.0 / (static_cast<double>(n) * ts);
  p.doppler_grid_hz = doppler_grid(31 * step, step);
  ASSERT_EQ(p.doppler_grid_hz.size(), n);
  const auto sg = nu_stft(s, p);
  const std::size_t row = 10;  // tau = 1.0 s, samples 69..131
  ASSERT_NEAR(sg.times_s[row], 1.0, 1e-12);
  const std::vector<Complex> seg(s.values.begin() + 69, s.values.begin() + 69 + n);
  const auto spectrum = fft(seg);
  double worst = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    const long m = static_cast<long>(c) - 31;
    const Complex want = spectrum[static_cast<std::size_t>((m + static_cast<long>(n)) % static_cast<long>(n))] *
                         std::exp(Complex(0.0, -oracle::kTwoPi * p.doppler_grid_hz[c] * 69 * ts));
    worst = std::max(worst, std::abs(sg.at(row, c) - want));
  }
  EXPECT_LE(worst, 1e-9 * oracle::max_abs(spectrum));
}

TEST(NuStft, FlagsColumnsWithGaps) {
  RelativeChannelSeries s;
  for (int i = 0; i <= 100; ++i) s.timestamps_s.push_back(0.01 * i);
  for (int i = 0; i <= 100; ++i) s.timestamps_s.push_back(3.0 + 0.01 * i);
  s.values.assign(s.timestamps_s.size(), Complex(1.0, 0.0));
  StftParams p;
  p.window_span_s = 0.5;
  p.hop_s = 0.1;
  p.doppler_grid_hz = {0.0};
  const auto sg = nu_stft(s, p);
  auto flag_at = [&](double tau) {
    for (std::size_t r = 0; r < sg.rows(); ++r) {
      if (std::abs(sg.times_s[r] - tau) < 1e-9) return static_cast<bool>(sg.low_support[r]);
    }
    ADD_FAILURE() << "no row at " << tau;
    return false;
  };
  EXPECT_FALSE(flag_at(0.5));
  EXPECT_TRUE(flag_at(1.1));   // window runs 0.35 s past the last sample
  EXPECT_TRUE(flag_at(2.0));   // empty window
  EXPECT_FALSE(flag_at(3.5));
  // An empty normalized column is zero rather than NaN.
  for (std::size_t r = 0; r < sg.rows(); ++r) EXPECT_TRUE(std::isfinite(std::abs(sg.at(r, 0))));
}

TEST(NuStft, RejectsBadParameters) {
  RelativeChannelSeries s;
  s.timestamps_s = {0.0, 1.0};
  s.values = {1.0, 1.0};
  StftParams p;
  p.hop_s = 0.0;
  EXPECT_THROW(nu_stft(s, p), InvalidArgument);
  p = {};
  p.doppler_grid_hz.clear();
  EXPECT_THROW(nu_stft(s, p), InvalidArgument);
}

TEST(GlobalSpectrum, ToneHasUnitPeakAtItsFrequency) {
  std::mt19937_64 rng(47);
  auto s = jittered_series(rng, 3000, 0.001);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.values[i] = std::polar(1.0, oracle::kTwoPi * 3.0 * s.timestamps_s[i]);
  }
  const std::vector<double> grid = {-3.0, 0.0, 3.0};
  const auto g = global_doppler_spectrum(s, grid);
  EXPECT_NEAR(g[2], 1.0, 1e-12);
  EXPECT_LT(g[0], 0.1);
  EXPECT_LT(g[1], 0.1);
}

TEST(Peaks, ArgmaxAndLocalMaxima) {
  DopplerSpectrogram sg;
  sg.times_s = {0.0, 1.0, 2.0};
  sg.frequencies_hz = {-2.0, -1.0, 0.0, 1.0, 2.0};
  sg.values = {1, 3, 2, 5, 1,   // two local maxima
               1, 1, 1, 1, 1,   // flat
               9, 9, 9, 9, 9};  // low support
  sg.low_support = {false, false, true};
  auto peaks = peak_doppler(sg);
  ASSERT_EQ(peaks.size(), 2u);
  EXPECT_DOUBLE_EQ(peaks[0].frequency_hz, 1.0);
  EXPECT_DOUBLE_EQ(peaks[0].magnitude, 5.0);

  PeakOptions two;
  two.max_peaks = 2;
  peaks = peak_doppler(sg, two);
  ASSERT_GE(peaks.size(), 2u);
  EXPECT_DOUBLE_EQ(peaks[0].frequency_hz, 1.0);
  EXPECT_DOUBLE_EQ(peaks[1].frequency_hz, -1.0);

  PeakOptions strict;
  strict.min_above_median_db = 3.0;
  peaks = peak_doppler(sg, strict);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_DOUBLE_EQ(peaks[0].time_s, 0.0);

  PeakOptions everything;
  everything.skip_low_support = false;
  everything.per_column = false;
  peaks = peak_doppler(sg, everything);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_DOUBLE_EQ(peaks[0].magnitude, 9.0);
}

TEST(Velocity, ConversionsMatchOracle) {
  EXPECT_NEAR(wavelength(kFc), 0.011943922629482072, 1e-17);
  EXPECT_NEAR(doppler_to_velocity(200.0, kFc), 1.1943922629482, 1e-12);
  EXPECT_NEAR(doppler_to_velocity(350.0, kFc), 2.0901864601594, 1e-12);
  EXPECT_NEAR(doppler_to_velocity(50.0, kFc), 0.2985980657371, 1e-12);
  EXPECT_NEAR(doppler_to_velocity(-5.232786743421010, kFc), -0.03125, 1e-14);
  EXPECT_THROW(wavelength(0.0), InvalidArgument);
}

TEST(Magnitude, DecibelsWithFloor) {
  EXPECT_DOUBLE_EQ(magnitude_db(10.0), 20.0);
  EXPECT_DOUBLE_EQ(magnitude_db(0.0), kDbFloor);
  EXPECT_DOUBLE_EQ(magnitude_db(1e-9, -60.0), -60.0);
}
