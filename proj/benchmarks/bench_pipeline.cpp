#include <benchmark/benchmark.h>

#include <random>

#include "diffsense/differential.hpp"
#include "diffsense/doppler.hpp"
#include "diffsense/fft.hpp"
#include "diffsense/scene.hpp"
#include "diffsense/segmentation.hpp"

using namespace diffsense;

namespace {

std::vector<Complex> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  for (auto& z : v) {
    const double re = g(rng);
    z = {re, g(rng)};
  }
  return v;
}

RelativeChannelSeries jittered_series(std::size_t n, double mean_dt) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dt(0.2 * mean_dt, 1.8 * mean_dt);
  RelativeChannelSeries s;
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.timestamps_s.push_back(t);
    t += dt(rng);
  }
  s.values = noise(n, 6);
  return s;
}

// Bursts of constant amplitude separated by silence, like the reference
// channel of the plate scenes.
std::vector<ComplexF> burst_stream(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> burst(300, 800), gap(400, 1200);
  std::vector<ComplexF> x;
  x.reserve(n);
  while (x.size() < n) {
    x.resize(std::min(n, x.size() + gap(rng)));
    const std::size_t len = std::min(n - x.size(), burst(rng));
    for (std::size_t i = 0; i < len; ++i) x.emplace_back(0.7f, 0.7f);
  }
  return x;
}

}  // namespace

static void BM_FrameSpectrum(benchmark::State& state) {
  const auto w = static_cast<std::size_t>(state.range(0));
  const auto x = noise(w, 1);
  // The series computation plans once per window size, so planning stays out of the loop.
  const FftPlan plan(w, FftDirection::Forward);
  std::vector<Complex> out(w);
  for (auto _ : state) {
    plan.execute(x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FrameSpectrum)->Arg(64)->Arg(316)->Arg(1024);

static void BM_FrameSpectrumWithPlanning(benchmark::State& state) {
  const auto w = static_cast<std::size_t>(state.range(0));
  const auto x = noise(w, 1);
  for (auto _ : state) benchmark::DoNotOptimize(frame_spectrum(x, w));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FrameSpectrumWithPlanning)->Arg(316);

static void BM_DetectFrames(benchmark::State& state) {
  const auto x = burst_stream(static_cast<std::size_t>(state.range(0)));
  SegmentationParams p;
  for (auto _ : state) benchmark::DoNotOptimize(detect_frames(std::span<const ComplexF>(x), p));
  state.SetBytesProcessed(state.iterations() * state.range(0) * 8);
}
BENCHMARK(BM_DetectFrames)->Arg(1 << 20)->Arg(1 << 23);

static void BM_DifferentialSeries(benchmark::State& state) {
  AlignedFrameSet set;
  set.window_size = 316;
  for (int i = 0; i < state.range(0); ++i) {
    AlignedFrame f;
    f.start_time_s = 1e-3 * i;
    f.channel1 = noise(316, 10 + i);
    f.channel2 = noise(316, 20000 + i);
    set.frames.push_back(std::move(f));
  }
  for (auto _ : state) benchmark::DoNotOptimize(compute_differential_series(set));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DifferentialSeries)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_NuStftPlate(benchmark::State& state) {
  // 12.8 s of frames at ~700 per second, 1 s Hann, 0.05 Hz grid to +/-15 Hz.
  const auto s = jittered_series(9000, 12.8 / 9000);
  StftParams p;
  for (auto _ : state) benchmark::DoNotOptimize(nu_stft(s, p));
}
BENCHMARK(BM_NuStftPlate)->Unit(benchmark::kMillisecond);

static void BM_NuStftHuman(benchmark::State& state) {
  const auto s = jittered_series(15000, 6.0 / 15000);
  StftParams p;
  p.window_span_s = 0.128;
  p.hop_s = 0.02;
  p.doppler_grid_hz = doppler_grid(400.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(nu_stft(s, p));
}
BENCHMARK(BM_NuStftHuman)->Unit(benchmark::kMillisecond);

static void BM_SimulateScene(benchmark::State& state) {
  Scene s;
  s.duration_s = 0.5;
  s.reference_paths = {{{1.0, 0.0}, 7e-9, 0.0}, {{0.3, 0.1}, 1.1e-8, 0.3}};
  s.sensing_static_paths = {{{0.4, 0.2}, 1.2e-8, kPi}};
  DynamicPath p;
  p.trajectory.speed_mps = 1.0;
  p.trajectory.initial_path_distance_m = 5.0;
  p.arrival_angle_rad = kPi;
  s.dynamic_paths = {p};
  s.noise.snr_db = 30.0;
  s.distortion.phase_noise_linewidth_hz = 50.0;
  s.acquisition.block_duration_s = s.duration_s;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_scene(s));
  state.SetItemsProcessed(state.iterations() * 500000);
}
BENCHMARK(BM_SimulateScene)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
