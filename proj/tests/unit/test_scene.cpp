#include <gtest/gtest.h>

#include <random>

#include "diffsense/errors.hpp"
#include "diffsense/scene.hpp"
#include "support/oracles.hpp"

using namespace diffsense;

namespace {

constexpr double kFc = 25.1e9;

Scene tiny_scene() {
  Scene s;
  s.label = "tiny";
  s.duration_s = 0.1;
  s.center_frequency_hz = kFc;
  s.acquisition.sample_rate_hz = 1e5;
  s.acquisition.block_duration_s = s.duration_s;
  s.tx.burst_duration = {2e-3, 4e-3};
  s.tx.gap_duration = {1e-3, 3e-3};
  s.tx.symbol_rate_hz = 1e5;
  s.reference_paths = {{{1.0, 0.0}, 0.0, 0.0}};
  s.sensing_static_paths = {{{0.5, 0.2}, 0.0, kPi}};
  return s;
}

TrajectorySpec plate_legs() {
  TrajectorySpec t;
  t.kind = TrajectoryKind::PiecewiseToAndFro;
  t.speed_mps = 0.03125;
  t.segment_duration_s = 3.2;
  t.initial_path_distance_m = 3.3;
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Transmitter
// ---------------------------------------------------------------------------

TEST(TxBursts, ScheduleIsOrderedAndSilentBetweenBursts) {
  TxBurstModel m;
  m.burst_duration = {1e-3, 2e-3};
  m.gap_duration = {0.5e-3, 1e-3};
  m.seed = 42;
  const double fs = 1e5;
  const TxBursts tx = generate_tx_bursts(m, 0.5, fs);
  ASSERT_EQ(tx.samples.size(), 50000u);
  ASSERT_GT(tx.schedule.size(), 100u);
  std::vector<bool> active(tx.samples.size(), false);
  std::size_t prev_end = 0;
  for (const Burst& b : tx.schedule) {
    EXPECT_GE(b.start, prev_end);
    EXPECT_GE(b.length, 1u);
    EXPECT_LE(b.start + b.length, tx.samples.size());
    if (b.start + b.length < tx.samples.size()) {
      EXPECT_GE(b.length, static_cast<std::size_t>(1e-3 * fs) - 1);
      EXPECT_LE(b.length, static_cast<std::size_t>(2e-3 * fs) + 1);
    }
    for (std::size_t k = b.start; k < b.start + b.length; ++k) active[k] = true;
    prev_end = b.start + b.length;
  }
  for (std::size_t k = 0; k < tx.samples.size(); ++k) {
    if (active[k]) {
      EXPECT_GT(std::abs(tx.samples[k]), 0.0) << k;
    } else {
      EXPECT_EQ(tx.samples[k], Complex{}) << k;
    }
  }
}

TEST(TxBursts, PowerScalesSamplesAndKeepsSchedule) {
  TxBurstModel m;
  m.seed = 9;
  const TxBursts one = generate_tx_bursts(m, 0.05, 1e6);
  m.power = 2.0;
  const TxBursts two = generate_tx_bursts(m, 0.05, 1e6);
  m.power = 0.0;
  const TxBursts none = generate_tx_bursts(m, 0.05, 1e6);
  ASSERT_EQ(one.schedule.size(), two.schedule.size());
  ASSERT_EQ(one.schedule.size(), none.schedule.size());
  for (std::size_t i = 0; i < one.schedule.size(); ++i) {
    EXPECT_EQ(one.schedule[i].start, none.schedule[i].start);
  }
  for (std::size_t k = 0; k < one.samples.size(); ++k) {
    ASSERT_EQ(two.samples[k], 2.0 * one.samples[k]);
    ASSERT_EQ(none.samples[k], Complex{});
  }
}

TEST(TxBursts, SeedDeterminesOutput) {
  TxBurstModel m;
  m.seed = 5;
  const auto a = generate_tx_bursts(m, 0.02, 1e6);
  const auto b = generate_tx_bursts(m, 0.02, 1e6);
  m.seed = 6;
  const auto c = generate_tx_bursts(m, 0.02, 1e6);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
}

TEST(TxBursts, ZeroGapSingleBurstFillsTheStream) {
  TxBurstModel m;
  m.burst_duration = {0.01, 0.01};
  m.gap_duration = {0.0, 0.0};
  const auto tx = generate_tx_bursts(m, 0.01, 1e5);
  ASSERT_EQ(tx.schedule.size(), 1u);
  EXPECT_EQ(tx.schedule[0].start, 0u);
  EXPECT_EQ(tx.schedule[0].length, 1000u);
}

TEST(TxBursts, SymbolsHoldForTheirDuration) {
  TxBurstModel m;
  m.symbol_rate_hz = 0.25e6;
  m.burst_duration = {1e-3, 1e-3};
  const auto tx = generate_tx_bursts(m, 0.01, 1e6);
  for (const Burst& b : tx.schedule) {
    for (std::size_t k = b.start; k + 1 < b.start + b.length; ++k) {
      if ((k - b.start) % 4 != 3) ASSERT_EQ(tx.samples[k], tx.samples[k + 1]);
    }
  }
  // Unit-power QPSK constellation.
  EXPECT_NEAR(std::abs(tx.samples[tx.schedule[0].start]), 1.0, 1e-15);
}

TEST(TxBursts, LeadInKeepsTheStartSilent) {
  TxBurstModel m;
  m.lead_in_s = 0.01;
  const auto tx = generate_tx_bursts(m, 0.05, 1e6);
  ASSERT_FALSE(tx.schedule.empty());
  EXPECT_GE(tx.schedule.front().start, 10000u);
}

TEST(TxBursts, RejectsInvalidModels) {
  TxBurstModel m;
  m.burst_duration = {0.0, 1e-3};
  EXPECT_THROW(generate_tx_bursts(m, 1.0, 1e6), InvalidArgument);
  m = {};
  m.gap_duration = {2e-3, 1e-3};
  EXPECT_THROW(generate_tx_bursts(m, 1.0, 1e6), InvalidArgument);
  m = {};
  EXPECT_THROW(generate_tx_bursts(m, 0.0, 1e6), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Antenna and trajectories
// ---------------------------------------------------------------------------

TEST(Antenna, CosinePowerWithBackLobeFloor) {
  const AntennaPattern a{0.0, 2.0, 0.05};
  EXPECT_DOUBLE_EQ(a.gain(0.0), 1.0);
  EXPECT_NEAR(a.gain(kPi / 3), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(a.gain(kPi), 0.05);
  EXPECT_DOUBLE_EQ(a.gain(kPi / 2 + 0.01), 0.05);
  const AntennaPattern back{kPi, 2.0, 0.05};
  EXPECT_NEAR(back.gain(-kPi), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(back.gain(0.0), 0.05);
}

TEST(Trajectory, ToAndFroAlternatesPathRate) {
  const TrajectorySpec t = plate_legs();
  for (int leg = 0; leg < 4; ++leg) {
    const double mid = 3.2 * leg + 1.6;
    const double want = leg % 2 == 0 ? -0.0625 : 0.0625;
    EXPECT_DOUBLE_EQ(trajectory_path_rate(t, mid), want) << leg;
  }
  EXPECT_NEAR(trajectory_path_distance(t, 3.2), 3.3 - 0.2, 1e-12);
  EXPECT_NEAR(trajectory_path_distance(t, 6.4), 3.3, 1e-12);
  EXPECT_NEAR(trajectory_path_distance(t, 8.0), 3.2, 1e-12);
}

TEST(Trajectory, PlateDopplerMatchesOracle) {
  // -f_c * rate / c for the approaching leg; oracle from 40-digit arithmetic.
  const double f = -kFc * trajectory_path_rate(plate_legs(), 1.0) / kSpeedOfLight;
  EXPECT_NEAR(f, 5.232786743421010, 1e-12);
}

TEST(Trajectory, RateIsTheDerivativeOfDistance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> speed(0.1, 3.0), period(0.2, 4.0), time(0.0, 10.0);
  for (int trial = 0; trial < 300; ++trial) {
    TrajectorySpec t;
    t.kind = static_cast<TrajectoryKind>(trial % 3);
    t.speed_mps = speed(rng);
    t.segment_duration_s = period(rng);
    t.initial_path_distance_m = 100.0;
    t.round_trip = trial % 2 == 0;
    t.start_direction = trial % 4 < 2 ? MotionDirection::Approaching : MotionDirection::Receding;
    if (trial % 5 == 0) t.micro_motion = MicroMotion{0.03, 1.7};
    const double x = time(rng);
    // Skip points next to a leg corner, where the derivative jumps.
    const double phase = std::fmod(x, t.segment_duration_s);
    if (t.kind == TrajectoryKind::PiecewiseToAndFro &&
        (phase < 1e-3 || t.segment_duration_s - phase < 1e-3)) {
      continue;
    }
    const double h = 1e-6;
    const double numeric =
        (trajectory_path_distance(t, x + h) - trajectory_path_distance(t, x - h)) / (2 * h);
    ASSERT_NEAR(trajectory_path_rate(t, x), numeric, 1e-5 * (1 + std::abs(numeric))) << trial;
  }
}

TEST(Trajectory, SinusoidalFollowsClosedForm) {
  TrajectorySpec t;
  t.kind = TrajectoryKind::Sinusoidal;
  t.speed_mps = 2.09;
  t.segment_duration_s = 0.5;
  t.initial_path_distance_m = 1.0;
  t.round_trip = true;
  for (double x : {0.0, 0.1, 0.125, 0.37, 1.9}) {
    const double want = 1.0 - 2.0 * 2.09 * 0.5 / oracle::kTwoPi * std::sin(oracle::kTwoPi * x / 0.5);
    EXPECT_NEAR(trajectory_path_distance(t, x), want, 1e-12);
  }
  EXPECT_NEAR(trajectory_path_rate(t, 0.0), -2.0 * 2.09, 1e-12);
}

TEST(Trajectory, MotionWindowFreezesPathOutsideIt) {
  TrajectorySpec t;
  t.speed_mps = 1.0;
  t.initial_path_distance_m = 10.0;
  t.motion_start_s = 1.0;
  t.motion_end_s = 3.0;
  EXPECT_DOUBLE_EQ(trajectory_path_distance(t, 0.5), 10.0);
  EXPECT_DOUBLE_EQ(trajectory_path_rate(t, 0.5), 0.0);
  EXPECT_NEAR(trajectory_path_distance(t, 2.0), 8.0, 1e-12);
  EXPECT_NEAR(trajectory_path_distance(t, 5.0), 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(trajectory_path_rate(t, 5.0), 0.0);
  EXPECT_NEAR(trajectory_min_distance(t, 5.0), 6.0, 1e-9);
}

// ---------------------------------------------------------------------------
// Plate
// ---------------------------------------------------------------------------

TEST(Plate, WavenumberMatchesOracle) {
  EXPECT_NEAR(PlateGeometry{}.wavenumber(), 526.0571005098721, 1e-10);
}

TEST(Plate, ScatteredFieldMatchesOracle) {
  PlateGeometry p;  // 10 cm x 10 cm, 25.1 GHz, E0 = 1
  const Complex e = plate_scattered_field(p, 3.3);
  EXPECT_NEAR(e.real(), -0.24528181607787957, 1e-12);
  EXPECT_NEAR(e.imag(), 0.06485397042366474, 1e-12);
  EXPECT_NEAR(std::abs(e), 0.2537108724082914, 1e-13);
}

TEST(Plate, FieldMatchesIndependentFormulaForRandomGeometry) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> size(0.01, 0.5), dist(0.5, 20.0), amp(0.1, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    PlateGeometry p;
    p.width_m = size(rng);
    p.height_m = size(rng);
    p.incident_amplitude = amp(rng);
    const double r = dist(rng);
    const Complex want = oracle::plate_field(p.incident_amplitude, p.width_m, p.height_m, kFc, r);
    ASSERT_LE(std::abs(plate_scattered_field(p, r) - want), 1e-11 * std::abs(want));
  }
}

TEST(Plate, RejectsNonPositiveDistance) {
  EXPECT_THROW(plate_scattered_field(PlateGeometry{}, 0.0), InvalidArgument);
  EXPECT_THROW(plate_scattered_field(PlateGeometry{}, -1.0), InvalidArgument);
}

TEST(Plate, PathGainReproducesFieldAlongTrajectory) {
  const PlateGeometry p;
  const TrajectorySpec t = plate_legs();
  const DynamicPath path = make_plate_path(p, t, kPi);
  const AntennaPattern facing{kPi, 2.0, 0.05};
  std::vector<double> times = {0.0, 0.7, 3.2, 5.5, 11.1};
  const auto field = plate_reference_series(p, t, times);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Complex g = dynamic_path_gain(path, facing, kFc, times[i]);
    EXPECT_LE(std::abs(g - field[i]), 1e-9 * std::abs(field[i])) << times[i];
  }
}

// ---------------------------------------------------------------------------
// Common-mode distortion and acquisition
// ---------------------------------------------------------------------------

TEST(CommonMode, PureCfoIsAPhaseRamp) {
  CommonDistortion d;
  d.cfo_hz = 1000.0;
  d.device_response = std::polar(0.8, 0.6);
  const auto m = common_mode_factor(d, 5000, 1e6);
  for (std::size_t k = 0; k < m.size(); k += 97) {
    const Complex want = std::polar(0.8, 0.6 + oracle::kTwoPi * 1000.0 * k / 1e6);
    EXPECT_LE(std::abs(m[k] - want), 1e-12);
  }
}

TEST(CommonMode, PhaseNoiseHasWienerIncrements) {
  CommonDistortion d;
  d.phase_noise_linewidth_hz = 50.0;
  const std::size_t n = 200000;
  const double fs = 1e6;
  const auto m = common_mode_factor(d, n, fs);
  double sum_sq = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    EXPECT_NEAR(std::abs(m[k]), 1.0, 1e-12);
    const double step = std::arg(m[k] / m[k - 1]);
    sum_sq += step * step;
  }
  const double var = sum_sq / static_cast<double>(n - 1);
  EXPECT_NEAR(var / (oracle::kTwoPi * 50.0 / fs), 1.0, 0.02);
}

TEST(Acquisition, DutyRatioOfTheTimingExample) {
  AcquisitionModel a{1.9, 1.3, 100.0};
  EXPECT_DOUBLE_EQ(a.duty_ratio(), 1.9 / 3.2);
  EXPECT_DOUBLE_EQ(1.0 / a.duty_ratio(), 1.6842105263157894);
}

TEST(Acquisition, RetainedSamplesComeFromTheirTrueIndices) {
  AcquisitionModel a{1.9, 1.3, 100.0};
  IQRecording rec;
  rec.sample_rate_hz = 100.0;
  for (int i = 0; i < 700; ++i) {
    rec.channel1.emplace_back(static_cast<float>(i), 0.0f);
    rec.channel2.emplace_back(0.0f, static_cast<float>(i));
  }
  const IQRecording out = apply_acquisition_model(rec, a);
  // 700 = 2 full cycles (640) + 60 samples of a third block.
  ASSERT_EQ(out.size(), 190u * 2 + 60u);
  for (std::size_t r = 0; r < out.size(); ++r) {
    const auto t = retained_to_true_index(a, r);
    ASSERT_EQ(out.channel1[r].real(), static_cast<float>(t));
    ASSERT_EQ(out.channel2[r].imag(), static_cast<float>(t));
  }
  EXPECT_DOUBLE_EQ(out.metadata.at("duty_ratio").get<double>(), 0.59375);
  EXPECT_DOUBLE_EQ(out.metadata.at("true_duration_s").get<double>(), 7.0);
}

TEST(Acquisition, NoDeadTimeLeavesSamplesUnchanged) {
  IQRecording rec;
  rec.sample_rate_hz = 10.0;
  rec.channel1 = {{1, 2}, {3, 4}, {5, 6}};
  rec.channel2 = {{7, 8}, {9, 10}, {11, 12}};
  const IQRecording out = apply_acquisition_model(rec, AcquisitionModel{0.1, 0.0, 10.0});
  EXPECT_EQ(out.channel1, rec.channel1);
  EXPECT_EQ(out.channel2, rec.channel2);
  EXPECT_DOUBLE_EQ(out.metadata.at("duty_ratio").get<double>(), 1.0);
}

// ---------------------------------------------------------------------------
// Synthesis
// ---------------------------------------------------------------------------

TEST(Synthesis, NonDispersiveChannelsKeepAConstantRatioUnderDistortion) {
  Scene s = tiny_scene();
  s.distortion.cfo_hz = 1234.0;
  s.distortion.phase_noise_linewidth_hz = 80.0;
  s.distortion.device_response = std::polar(0.7, 1.2);
  const TxBursts tx = generate_tx_bursts(s.tx, s.duration_s, s.sample_rate_hz());
  const ChannelPair ch = synthesize_channels(s, tx);
  // g_ref(0) = 1, g_sense(pi) = 1 for the default patterns.
  const Complex want = Complex(0.5, 0.2) / Complex(1.0, 0.0);
  for (std::size_t k = 0; k < tx.samples.size(); ++k) {
    if (tx.samples[k] == Complex{}) {
      ASSERT_EQ(ch.channel1[k], Complex{});
      continue;
    }
    ASSERT_LE(std::abs(ch.channel2[k] / ch.channel1[k] - want), 1e-12);
  }
}

TEST(Synthesis, IntegerDelayShiftsTheBurstAndRotatesTheCarrier) {
  Scene s = tiny_scene();
  const double tau = 3.0 / s.sample_rate_hz();
  s.reference_paths = {{{0.9, 0.0}, tau, 0.0}};
  const TxBursts tx = generate_tx_bursts(s.tx, s.duration_s, s.sample_rate_hz());
  const ChannelPair ch = synthesize_channels(s, tx);
  const Complex carrier = std::polar(0.9, -oracle::kTwoPi * kFc * tau);
  for (std::size_t k = 0; k < tx.samples.size(); ++k) {
    const Complex want = k >= 3 ? carrier * tx.samples[k - 3] : Complex{};
    ASSERT_LE(std::abs(ch.channel1[k] - want), 1e-9) << k;
  }
}

TEST(Synthesis, NoiseMatchesTheRequestedSnr) {
  Scene s = tiny_scene();
  s.duration_s = 1.0;
  s.acquisition.block_duration_s = 1.0;
  s.noise.snr_db = 10.0;
  const TxBursts tx = generate_tx_bursts(s.tx, s.duration_s, s.sample_rate_hz());
  const ChannelPair ch = synthesize_channels(s, tx);
  double noise = 0.0;
  std::size_t quiet = 0;
  for (std::size_t k = 0; k < tx.samples.size(); ++k) {
    if (tx.samples[k] != Complex{}) continue;
    noise += std::norm(ch.channel1[k]);
    ++quiet;
  }
  ASSERT_GT(quiet, 10000u);
  EXPECT_NEAR(noise / static_cast<double>(quiet), 0.1, 0.005);
}

TEST(Synthesis, MovingPathCarriesItsDoppler) {
  Scene s = tiny_scene();
  s.sensing_static_paths.clear();
  TrajectorySpec t;
  t.speed_mps = 1.1943922629482;
  t.initial_path_distance_m = 4.0;
  DynamicPath p;
  p.trajectory = t;
  p.arrival_angle_rad = kPi;
  s.dynamic_paths = {p};
  s.tx.gap_duration = {0.0, 0.0};
  s.tx.burst_duration = {1.0, 1.0};
  s.tx.symbol_rate_hz = 1e3;
  const TxBursts tx = generate_tx_bursts(s.tx, s.duration_s, s.sample_rate_hz());
  const ChannelPair ch = synthesize_channels(s, tx);
  // The ratio rotates at +200 Hz (approaching).
  const double dt = 1.0 / s.sample_rate_hz();
  Complex lag{};
  for (std::size_t k = 1000; k < 9000; ++k) {
    lag += (ch.channel2[k + 1] / ch.channel1[k + 1]) * std::conj(ch.channel2[k] / ch.channel1[k]);
  }
  EXPECT_NEAR(std::arg(lag) / (oracle::kTwoPi * dt), 200.0, 0.05);
}

TEST(Simulation, IsDeterministicAndRecordsMetadata) {
  Scene s = tiny_scene();
  s.noise.snr_db = 20.0;
  s.distortion.phase_noise_linewidth_hz = 10.0;
  s.impairments[0].imbalance = {1.02, 0.01};
  s.acquisition.block_duration_s = 0.019;
  s.acquisition.dead_time_s = 0.013;
  const SimulationResult a = simulate_scene(s);
  const SimulationResult b = simulate_scene(s);
  EXPECT_TRUE(a.recording == b.recording);
  EXPECT_DOUBLE_EQ(a.recording.metadata.at("duty_ratio").get<double>(), 19.0 / 32.0);
  EXPECT_DOUBLE_EQ(a.truth.true_time_scale, 32.0 / 19.0);
  EXPECT_EQ(a.recording.metadata.at("scenario"), "tiny");
  EXPECT_DOUBLE_EQ(
      a.recording.metadata.at("iq_calibration").at("channel1").at("gain_mismatch").get<double>(),
      1.02);
  EXPECT_LT(a.recording.size(), 10000u);
}

TEST(Simulation, GroundTruthTracksFollowTheTrajectory) {
  Scene s = tiny_scene();
  DynamicPath p;
  p.trajectory = plate_legs();
  s.dynamic_paths = {p};
  const SimulationResult r = simulate_scene(s);
  ASSERT_EQ(r.truth.doppler_hz.size(), 1u);
  for (double f : r.truth.doppler_hz[0]) EXPECT_NEAR(f, 5.232786743421010, 1e-9);
  EXPECT_EQ(r.truth.track_times_s.size(), r.truth.path_distance_m[0].size());
}

TEST(SceneValidation, NamesTheOffendingField) {
  Scene s = tiny_scene();
  s.reference_paths.clear();
  try {
    s.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "reference_paths");
  }
  s = tiny_scene();
  DynamicPath p;
  p.trajectory.speed_mps = 10.0;
  p.trajectory.initial_path_distance_m = 0.5;
  s.dynamic_paths = {p};
  try {
    s.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "dynamic_paths[0].trajectory");
  }
  s = tiny_scene();
  s.tx.symbol_rate_hz = -1.0;
  try {
    s.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "tx");
  }
}
