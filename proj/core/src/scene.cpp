#include "diffsense/scene.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "diffsense/errors.hpp"
#include "diffsense/fft.hpp"

namespace diffsense {

namespace {

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

double draw(std::mt19937_64& rng, const DurationRange& range) {
  if (range.min_s == range.max_s) return range.min_s;
  return std::uniform_real_distribution<double>(range.min_s, range.max_s)(rng);
}

double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Transmitter
// ---------------------------------------------------------------------------

void TxBurstModel::validate() const {
  if (!(burst_duration.min_s > 0.0) || !std::isfinite(burst_duration.max_s)) {
    throw InvalidArgument("burst duration must be positive");
  }
  if (burst_duration.min_s > burst_duration.max_s) {
    throw InvalidArgument("burst duration range has min > max");
  }
  if (!(gap_duration.min_s >= 0.0) || !std::isfinite(gap_duration.max_s)) {
    throw InvalidArgument("gap duration must be non-negative");
  }
  if (gap_duration.min_s > gap_duration.max_s) {
    throw InvalidArgument("gap duration range has min > max");
  }
  if (!(symbol_rate_hz > 0.0) || !std::isfinite(symbol_rate_hz)) {
    throw InvalidArgument("symbol rate must be positive");
  }
  if (!(power >= 0.0) || !std::isfinite(power)) {
    throw InvalidArgument("transmit power must be a finite non-negative amplitude");
  }
  if (!(lead_in_s >= 0.0) || !std::isfinite(lead_in_s)) {
    throw InvalidArgument("lead-in must be non-negative");
  }
}

TxBursts generate_tx_bursts(const TxBurstModel& model, double total_duration_s,
                            double sample_rate_hz) {
  model.validate();
  if (!(total_duration_s > 0.0) || !std::isfinite(total_duration_s)) {
    throw InvalidArgument("total duration must be positive");
  }
  if (!(sample_rate_hz > 0.0)) throw InvalidArgument("sample rate must be positive");

  const auto n = static_cast<std::size_t>(std::llround(total_duration_s * sample_rate_hz));
  TxBursts out;
  out.samples.assign(n, Complex{});

  std::mt19937_64 rng(model.seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  std::uniform_int_distribution<int> quadrant(0, 3);
  const double qpsk = std::sqrt(0.5);

  double t = model.lead_in_s;
  while (true) {
    const double start = t + draw(rng, model.gap_duration);
    if (start >= total_duration_s) break;
    const double end = std::min(start + draw(rng, model.burst_duration), total_duration_s);
    t = end;

    auto s0 = static_cast<std::size_t>(std::llround(start * sample_rate_hz));
    const auto s1 = std::min(n, static_cast<std::size_t>(std::llround(end * sample_rate_hz)));
    if (!out.schedule.empty()) {
      const Burst& prev = out.schedule.back();
      s0 = std::max(s0, prev.start + prev.length);
    }
    if (s1 <= s0) continue;

    Burst burst;
    burst.start = s0;
    burst.length = s1 - s0;
    burst.start_s = static_cast<double>(s0) / sample_rate_hz;
    burst.duration_s = static_cast<double>(burst.length) / sample_rate_hz;
    out.schedule.push_back(burst);

    long last_symbol = -1;
    Complex symbol;
    for (std::size_t k = s0; k < s1; ++k) {
      const auto m = static_cast<long>(std::floor(static_cast<double>(k - s0) *
                                                  model.symbol_rate_hz / sample_rate_hz));
      if (m != last_symbol) {
        last_symbol = m;
        if (model.modulation == Modulation::RandomQpsk) {
          const int q = quadrant(rng);
          symbol = {(q & 1) ? -qpsk : qpsk, (q & 2) ? -qpsk : qpsk};
        } else {
          const double re = gauss(rng);
          symbol = {re, gauss(rng)};
        }
      }
      out.samples[k] = model.power * symbol;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Antennas and trajectories
// ---------------------------------------------------------------------------

double AntennaPattern::gain(double arrival_angle_rad) const {
  const double c = std::cos(wrap_angle(arrival_angle_rad - boresight_rad));
  if (c <= 0.0) return back_lobe_floor;
  return std::max(back_lobe_floor, std::pow(c, exponent));
}

void AntennaPattern::validate() const {
  if (!std::isfinite(boresight_rad)) throw InvalidArgument("antenna boresight must be finite");
  if (!(exponent >= 0.0) || !std::isfinite(exponent)) {
    throw InvalidArgument("antenna exponent must be non-negative");
  }
  if (!(back_lobe_floor > 0.0) || back_lobe_floor > 1.0) {
    throw InvalidArgument("antenna back-lobe floor must lie in (0, 1]");
  }
}

void TrajectorySpec::validate() const {
  if (!(speed_mps >= 0.0) || !std::isfinite(speed_mps)) {
    throw InvalidArgument("trajectory speed must be non-negative");
  }
  if (kind != TrajectoryKind::ConstantVelocity &&
      (!(segment_duration_s > 0.0) || !std::isfinite(segment_duration_s))) {
    throw InvalidArgument("trajectory segment duration must be positive");
  }
  if (!(initial_path_distance_m > 0.0) || !std::isfinite(initial_path_distance_m)) {
    throw InvalidArgument("initial path distance must be positive");
  }
  if (!(motion_start_s >= 0.0) || !(motion_end_s > motion_start_s)) {
    throw InvalidArgument("motion window must satisfy 0 <= start < end");
  }
  if (micro_motion) {
    if (!(micro_motion->amplitude_m >= 0.0) || !(micro_motion->frequency_hz >= 0.0) ||
        !std::isfinite(micro_motion->amplitude_m) || !std::isfinite(micro_motion->frequency_hz)) {
      throw InvalidArgument("micro-motion amplitude and frequency must be non-negative");
    }
  }
}

namespace {

// Elapsed motion time, frozen outside the motion window.
double motion_time(const TrajectorySpec& tr, double t) {
  return std::clamp(t, tr.motion_start_s, tr.motion_end_s) - tr.motion_start_s;
}

bool in_motion(const TrajectorySpec& tr, double t) {
  return t >= tr.motion_start_s && t < tr.motion_end_s;
}

double approach_sign(const TrajectorySpec& tr) {
  return tr.start_direction == MotionDirection::Approaching ? -1.0 : 1.0;
}

}  // namespace

double trajectory_path_distance(const TrajectorySpec& tr, double t) {
  const double tau = motion_time(tr, t);
  const double rate = approach_sign(tr) * tr.rate_factor() * tr.speed_mps;
  double offset = 0.0;
  switch (tr.kind) {
    case TrajectoryKind::ConstantVelocity:
      offset = rate * tau;
      break;
    case TrajectoryKind::PiecewiseToAndFro: {
      const double leg = tr.segment_duration_s;
      const double legs = std::floor(tau / leg);
      const double rem = tau - legs * leg;
      const bool odd = std::fmod(legs, 2.0) != 0.0;
      offset = odd ? rate * leg - rate * rem : rate * rem;
      break;
    }
    case TrajectoryKind::Sinusoidal: {
      const double period = tr.segment_duration_s;
      offset = rate * period / kTwoPi * std::sin(kTwoPi * tau / period);
      break;
    }
  }
  if (tr.micro_motion) {
    offset += tr.micro_motion->amplitude_m * std::sin(kTwoPi * tr.micro_motion->frequency_hz * tau);
  }
  return tr.initial_path_distance_m + offset;
}

double trajectory_path_rate(const TrajectorySpec& tr, double t) {
  if (!in_motion(tr, t)) return 0.0;
  const double tau = motion_time(tr, t);
  const double rate = approach_sign(tr) * tr.rate_factor() * tr.speed_mps;
  double v = 0.0;
  switch (tr.kind) {
    case TrajectoryKind::ConstantVelocity:
      v = rate;
      break;
    case TrajectoryKind::PiecewiseToAndFro: {
      const double legs = std::floor(tau / tr.segment_duration_s);
      v = std::fmod(legs, 2.0) != 0.0 ? -rate : rate;
      break;
    }
    case TrajectoryKind::Sinusoidal:
      v = rate * std::cos(kTwoPi * tau / tr.segment_duration_s);
      break;
  }
  if (tr.micro_motion) {
    const double w = kTwoPi * tr.micro_motion->frequency_hz;
    v += tr.micro_motion->amplitude_m * w * std::cos(w * tau);
  }
  return v;
}

double trajectory_min_distance(const TrajectorySpec& tr, double horizon_s) {
  constexpr int kSteps = 20000;
  double lo = trajectory_path_distance(tr, 0.0);
  for (int i = 1; i <= kSteps; ++i) {
    lo = std::min(lo, trajectory_path_distance(tr, horizon_s * i / kSteps));
  }
  // Extremes of the piecewise kind sit on leg boundaries.
  if (tr.kind == TrajectoryKind::PiecewiseToAndFro) {
    for (double b = tr.motion_start_s; b <= std::min(horizon_s, tr.motion_end_s);
         b += tr.segment_duration_s) {
      lo = std::min(lo, trajectory_path_distance(tr, b));
    }
  }
  return lo;
}

Complex dynamic_path_gain(const DynamicPath& path, const AntennaPattern& antenna,
                          double center_frequency_hz, double t) {
  const double d = trajectory_path_distance(path.trajectory, t);
  Complex a = path.base_amplitude;
  if (path.amplitude_model == AmplitudeModel::InverseDistance) {
    a *= path.trajectory.initial_path_distance_m / d;
  }
  const double phase = -kTwoPi * center_frequency_hz * d / kSpeedOfLight;
  return antenna.gain(path.arrival_angle_rad) * a * std::polar(1.0, phase);
}

// ---------------------------------------------------------------------------
// Plate
// ---------------------------------------------------------------------------

void PlateGeometry::validate() const {
  if (!(width_m > 0.0) || !(height_m > 0.0)) throw InvalidArgument("plate size must be positive");
  if (!(carrier_frequency_hz > 0.0)) throw InvalidArgument("plate wavenumber must be positive");
  if (!std::isfinite(incident_amplitude)) {
    throw InvalidArgument("incident amplitude must be finite");
  }
}

Complex plate_scattered_field(const PlateGeometry& plate, double r) {
  plate.validate();
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw InvalidArgument("plate observation distance must be positive");
  }
  const double beta = plate.wavenumber();
  const double scale = plate.incident_amplitude * plate.width_m * plate.height_m * beta / kTwoPi;
  return Complex(0.0, -scale) * std::polar(1.0 / r, -beta * r);
}

std::vector<Complex> plate_reference_series(const PlateGeometry& plate,
                                            const TrajectorySpec& trajectory,
                                            std::span<const double> times_s) {
  std::vector<Complex> out;
  out.reserve(times_s.size());
  for (double t : times_s) {
    out.push_back(plate_scattered_field(plate, trajectory_path_distance(trajectory, t)));
  }
  return out;
}

DynamicPath make_plate_path(const PlateGeometry& plate, const TrajectorySpec& trajectory,
                            double arrival_angle_rad) {
  plate.validate();
  trajectory.validate();
  const double beta = plate.wavenumber();
  const double d0 = trajectory.initial_path_distance_m;
  DynamicPath path;
  path.trajectory = trajectory;
  // base * (d0/d) * e^{-j beta d} reproduces the plate field at r = d.
  path.base_amplitude =
      Complex(0.0, -plate.incident_amplitude * plate.width_m * plate.height_m * beta / kTwoPi / d0);
  path.arrival_angle_rad = arrival_angle_rad;
  path.amplitude_model = AmplitudeModel::InverseDistance;
  return path;
}

// ---------------------------------------------------------------------------
// Receiver impairments and acquisition
// ---------------------------------------------------------------------------

void CommonDistortion::validate() const {
  if (!std::isfinite(cfo_hz)) throw InvalidArgument("CFO must be finite");
  if (!(phase_noise_linewidth_hz >= 0.0) || !std::isfinite(phase_noise_linewidth_hz)) {
    throw InvalidArgument("phase-noise linewidth must be non-negative");
  }
  if (!finite(device_response) || device_response == Complex{}) {
    throw InvalidArgument("device response must be finite and nonzero");
  }
}

std::vector<Complex> common_mode_factor(const CommonDistortion& distortion, std::size_t n,
                                        double sample_rate_hz) {
  distortion.validate();
  std::vector<Complex> out(n);
  std::mt19937_64 rng(distortion.seed);
  const double step_sigma =
      std::sqrt(kTwoPi * distortion.phase_noise_linewidth_hz / sample_rate_hz);
  std::normal_distribution<double> step(0.0, 1.0);
  double phi = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / sample_rate_hz;
    out[k] = distortion.device_response * std::polar(1.0, kTwoPi * distortion.cfo_hz * t + phi);
    if (step_sigma > 0.0) phi += step_sigma * step(rng);
  }
  return out;
}

void AcquisitionModel::validate() const {
  if (!(block_duration_s > 0.0) || !std::isfinite(block_duration_s)) {
    throw InvalidArgument("acquisition block duration must be positive");
  }
  if (!(dead_time_s >= 0.0) || !std::isfinite(dead_time_s)) {
    throw InvalidArgument("acquisition dead time must be non-negative");
  }
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw InvalidArgument("sample rate must be positive");
  }
}

std::size_t AcquisitionModel::block_samples() const {
  return std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(block_duration_s * sample_rate_hz)));
}

std::size_t AcquisitionModel::dead_samples() const {
  return static_cast<std::size_t>(std::llround(dead_time_s * sample_rate_hz));
}

double AcquisitionModel::duty_ratio() const {
  const auto b = static_cast<double>(block_samples());
  return b / (b + static_cast<double>(dead_samples()));
}

std::size_t retained_to_true_index(const AcquisitionModel& acquisition, std::size_t retained) {
  const std::size_t b = acquisition.block_samples();
  const std::size_t d = acquisition.dead_samples();
  return (retained / b) * (b + d) + retained % b;
}

IQRecording apply_acquisition_model(const IQRecording& continuous,
                                    const AcquisitionModel& acquisition) {
  acquisition.validate();
  if (acquisition.sample_rate_hz != continuous.sample_rate_hz) {
    throw InvalidArgument("acquisition sample rate differs from the recording's");
  }
  IQRecording out;
  out.sample_rate_hz = continuous.sample_rate_hz;
  out.center_frequency_hz = continuous.center_frequency_hz;
  out.metadata = continuous.metadata;

  const std::size_t b = acquisition.block_samples();
  const std::size_t d = acquisition.dead_samples();
  const std::size_t n = continuous.size();
  if (d == 0) {
    out.channel1 = continuous.channel1;
    out.channel2 = continuous.channel2;
  } else {
    out.channel1.reserve(n);
    out.channel2.reserve(n);
    for (std::size_t start = 0; start < n; start += b + d) {
      const std::size_t stop = std::min(n, start + b);
      out.channel1.insert(out.channel1.end(), continuous.channel1.begin() + start,
                          continuous.channel1.begin() + stop);
      out.channel2.insert(out.channel2.end(), continuous.channel2.begin() + start,
                          continuous.channel2.begin() + stop);
    }
  }
  const double true_duration = continuous.duration();
  const double retained = out.duration();
  out.metadata["acquisition_block_s"] = acquisition.block_duration_s;
  out.metadata["acquisition_dead_time_s"] = acquisition.dead_time_s;
  out.metadata["duty_ratio"] = acquisition.duty_ratio();
  out.metadata["true_duration_s"] = true_duration;
  out.metadata["retained_duration_s"] = retained;
  out.metadata["true_time_scale"] = 1.0 / acquisition.duty_ratio();
  return out;
}

// ---------------------------------------------------------------------------
// Channel synthesis
// ---------------------------------------------------------------------------

namespace {

// Applies frequency responses to the transmit stream. The padded spectrum
// is computed once and shared by every delayed path.
class Propagator {
 public:
  Propagator(std::span<const Complex> tx, double sample_rate_hz)
      : tx_(tx), fs_(sample_rate_hz) {}

  // IFFT(S(f) * h(f)) truncated to the stream length, h evaluated at the
  // signed baseband frequency of every bin.
  template <typename Response>
  std::vector<Complex> filter(Response&& h) {
    ensure_spectrum();
    std::vector<Complex> product(n_fft_);
    for (std::size_t k = 0; k < n_fft_; ++k) {
      const long q = k <= n_fft_ / 2 ? static_cast<long>(k)
                                     : static_cast<long>(k) - static_cast<long>(n_fft_);
      product[k] = spectrum_[k] * h(static_cast<double>(q) * fs_ / static_cast<double>(n_fft_));
    }
    std::vector<Complex> time(n_fft_);
    inverse_->execute(product, time);
    time.resize(tx_.size());
    const double scale = 1.0 / static_cast<double>(n_fft_);
    for (auto& v : time) v *= scale;
    return time;
  }

 private:
  void ensure_spectrum() {
    if (!spectrum_.empty()) return;
    constexpr std::size_t kGuard = 1024;  // keeps circular wrap-around in silence
    n_fft_ = next_fast_fft_size(tx_.size() + kGuard);
    std::vector<Complex> padded(n_fft_, Complex{});
    std::copy(tx_.begin(), tx_.end(), padded.begin());
    spectrum_.resize(n_fft_);
    FftPlan(n_fft_, FftDirection::Forward).execute(padded, spectrum_);
    inverse_.emplace(n_fft_, FftDirection::Inverse);
  }

  std::span<const Complex> tx_;
  double fs_;
  std::size_t n_fft_ = 0;
  std::vector<Complex> spectrum_;
  std::optional<FftPlan> inverse_;
};

std::vector<Complex> propagate_static(Propagator& prop, std::span<const Complex> tx,
                                      const std::vector<StaticPath>& paths,
                                      const AntennaPattern& antenna, double fc) {
  Complex direct{};
  std::vector<const StaticPath*> delayed;
  for (const auto& p : paths) {
    if (p.delay_s == 0.0) {
      direct += antenna.gain(p.arrival_angle_rad) * p.amplitude;
    } else {
      delayed.push_back(&p);
    }
  }
  std::vector<Complex> out;
  if (delayed.empty()) {
    out.assign(tx.size(), Complex{});
  } else {
    out = prop.filter([&](double f) {
      Complex h{};
      for (const StaticPath* p : delayed) {
        h += antenna.gain(p->arrival_angle_rad) * p->amplitude *
             std::polar(1.0, -kTwoPi * (fc + f) * p->delay_s);
      }
      return h;
    });
  }
  if (direct != Complex{}) {
    for (std::size_t k = 0; k < tx.size(); ++k) out[k] += direct * tx[k];
  }
  return out;
}

}  // namespace

ChannelPair synthesize_channels(const Scene& scene, const TxBursts& tx) {
  if (scene.reference_paths.empty()) {
    throw ConfigError("reference_paths", "the reference channel needs at least one path");
  }
  const double fs = scene.sample_rate_hz();
  const double fc = scene.center_frequency_hz;
  const std::size_t n = tx.samples.size();
  Propagator prop(tx.samples, fs);

  ChannelPair out;
  out.channel1 = propagate_static(prop, tx.samples, scene.reference_paths,
                                  scene.reference_antenna, fc);
  out.channel2 = propagate_static(prop, tx.samples, scene.sensing_static_paths,
                                  scene.sensing_antenna, fc);

  for (const DynamicPath& path : scene.dynamic_paths) {
    // Envelope delay fixed (by default at the initial path length); the
    // motion enters through the carrier phase of dynamic_path_gain.
    const double tau0 = path.envelope_delay_s
                            ? *path.envelope_delay_s
                            : path.trajectory.initial_path_distance_m / kSpeedOfLight;
    std::vector<Complex> delayed =
        tau0 == 0.0 ? std::vector<Complex>(tx.samples.begin(), tx.samples.end())
                    : prop.filter([&](double f) { return std::polar(1.0, -kTwoPi * f * tau0); });
    std::vector<Complex> gain(n);
    for (std::size_t k = 0; k < n; ++k) {
      gain[k] = dynamic_path_gain(path, scene.sensing_antenna, fc, static_cast<double>(k) / fs);
    }
    if (scene.dynamic_update == ChannelUpdate::PerBurst) {
      for (const Burst& b : tx.schedule) {
        std::fill(gain.begin() + b.start, gain.begin() + b.start + b.length, gain[b.start]);
      }
    }
    for (std::size_t k = 0; k < n; ++k) out.channel2[k] += gain[k] * delayed[k];
  }

  if (scene.noise.snr_db) {
    double power = 0.0;
    std::size_t active = 0;
    for (const Burst& b : tx.schedule) {
      for (std::size_t k = b.start; k < b.start + b.length; ++k) power += std::norm(out.channel1[k]);
      active += b.length;
    }
    power = active ? power / static_cast<double>(active) : 0.0;
    const double sigma = std::sqrt(power / std::pow(10.0, *scene.noise.snr_db / 10.0) / 2.0);
    if (sigma > 0.0) {
      std::mt19937_64 rng(scene.noise.seed);
      std::normal_distribution<double> g(0.0, sigma);
      for (auto* ch : {&out.channel1, &out.channel2}) {
        for (auto& v : *ch) {
          const double re = g(rng);
          v += Complex(re, g(rng));
        }
      }
    }
  }

  const std::vector<Complex> common = common_mode_factor(scene.distortion, n, fs);
  for (std::size_t k = 0; k < n; ++k) {
    out.channel1[k] *= common[k];
    out.channel2[k] *= common[k];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scene
// ---------------------------------------------------------------------------

void Scene::validate() const {
  auto check = [](const std::string& field, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(field, e.what());
    }
  };
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ConfigError("duration_s", "must be positive");
  }
  if (!(center_frequency_hz > 0.0) || !std::isfinite(center_frequency_hz)) {
    throw ConfigError("center_frequency_hz", "must be positive");
  }
  if (analysis_profile != "plate" && analysis_profile != "human") {
    throw ConfigError("analysis_profile", "must be \"plate\" or \"human\"");
  }
  check("tx", [&] { tx.validate(); });
  check("acquisition", [&] { acquisition.validate(); });
  check("reference_antenna", [&] { reference_antenna.validate(); });
  check("sensing_antenna", [&] { sensing_antenna.validate(); });
  check("distortion", [&] { distortion.validate(); });
  if (reference_paths.empty()) {
    throw ConfigError("reference_paths", "the reference channel needs at least one path");
  }
  auto check_static = [](const std::string& field, const std::vector<StaticPath>& paths) {
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto& p = paths[i];
      const std::string f = field + "[" + std::to_string(i) + "]";
      if (!finite(p.amplitude)) throw ConfigError(f + ".amplitude", "must be finite");
      if (!(p.delay_s >= 0.0) || !std::isfinite(p.delay_s)) {
        throw ConfigError(f + ".delay_s", "must be non-negative");
      }
      if (!std::isfinite(p.arrival_angle_rad)) {
        throw ConfigError(f + ".arrival_angle_rad", "must be finite");
      }
    }
  };
  check_static("reference_paths", reference_paths);
  check_static("sensing_static_paths", sensing_static_paths);
  for (std::size_t i = 0; i < dynamic_paths.size(); ++i) {
    const auto& p = dynamic_paths[i];
    const std::string f = "dynamic_paths[" + std::to_string(i) + "]";
    check(f + ".trajectory", [&] { p.trajectory.validate(); });
    if (!finite(p.base_amplitude)) throw ConfigError(f + ".base_amplitude", "must be finite");
    if (p.envelope_delay_s && !(*p.envelope_delay_s >= 0.0 && std::isfinite(*p.envelope_delay_s))) {
      throw ConfigError(f + ".envelope_delay_s", "must be non-negative");
    }
    if (!(trajectory_min_distance(p.trajectory, duration_s) > 0.0)) {
      throw ConfigError(f + ".trajectory", "path distance reaches zero within the scene");
    }
  }
  if (noise.snr_db && !std::isfinite(*noise.snr_db)) {
    throw ConfigError("noise.snr_db", "must be finite");
  }
  for (std::size_t c = 0; c < 2; ++c) {
    const std::string f = "impairments[" + std::to_string(c) + "]";
    if (!finite(impairments[c].dc_offset)) throw ConfigError(f + ".dc_offset", "must be finite");
    check(f + ".imbalance", [&] { impairments[c].imbalance.validate(); });
  }
}

nlohmann::json to_json(const GroundTruth& truth) {
  nlohmann::json bursts = nlohmann::json::array();
  for (const auto& b : truth.bursts) bursts.push_back({b.start, b.length});
  nlohmann::json paths = nlohmann::json::array();
  for (std::size_t i = 0; i < truth.path_distance_m.size(); ++i) {
    paths.push_back({{"distance_m", truth.path_distance_m[i]}, {"doppler_hz", truth.doppler_hz[i]}});
  }
  return {
      {"bursts", {{"columns", {"start_sample", "length"}}, {"rows", bursts}}},
      {"true_duration_s", truth.true_duration_s},
      {"retained_duration_s", truth.retained_duration_s},
      {"duty_ratio", truth.duty_ratio},
      {"true_k_t", truth.true_time_scale},
      {"tracks", {{"t_s", truth.track_times_s}, {"paths", paths}}},
  };
}

SimulationResult simulate_scene(const Scene& scene) {
  scene.validate();
  const double fs = scene.sample_rate_hz();
  const TxBursts tx = generate_tx_bursts(scene.tx, scene.duration_s, fs);
  ChannelPair channels = synthesize_channels(scene, tx);

  IQRecording continuous;
  continuous.sample_rate_hz = fs;
  continuous.center_frequency_hz = scene.center_frequency_hz;
  std::vector<ComplexF>* outs[2] = {&continuous.channel1, &continuous.channel2};
  std::vector<Complex>* ins[2] = {&channels.channel1, &channels.channel2};
  nlohmann::json iq_calibration = nlohmann::json::object();
  for (std::size_t c = 0; c < 2; ++c) {
    const ReceiverImpairment& imp = scene.impairments[c];
    const bool imbalanced = !(imp.imbalance == ImbalanceParams{});
    auto& in = *ins[c];
    auto& out = *outs[c];
    out.resize(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) {
      Complex v = imbalanced ? apply_iq_imbalance(in[k], imp.imbalance) : in[k];
      out[k] = ComplexF(v + imp.dc_offset);
    }
    in.clear();
    in.shrink_to_fit();
    iq_calibration["channel" + std::to_string(c + 1)] = {
        {"gain_mismatch", imp.imbalance.gain_mismatch},
        {"phase_mismatch_rad", imp.imbalance.phase_mismatch_rad}};
  }
  continuous.metadata = {
      {"scenario", scene.label},
      {"analysis_profile", scene.analysis_profile},
      {"tx_seed", scene.tx.seed},
      {"iq_calibration", iq_calibration},
  };

  SimulationResult result;
  result.recording = apply_acquisition_model(continuous, scene.acquisition);

  GroundTruth& truth = result.truth;
  truth.bursts = tx.schedule;
  truth.true_duration_s = continuous.duration();
  truth.retained_duration_s = result.recording.duration();
  truth.duty_ratio = scene.acquisition.duty_ratio();
  truth.true_time_scale = 1.0 / truth.duty_ratio;
  constexpr double kTrackRate = 100.0;
  const auto steps = static_cast<std::size_t>(std::floor(scene.duration_s * kTrackRate)) + 1;
  for (std::size_t i = 0; i < steps; ++i) truth.track_times_s.push_back(i / kTrackRate);
  for (const auto& p : scene.dynamic_paths) {
    std::vector<double> dist, dop;
    for (double t : truth.track_times_s) {
      dist.push_back(trajectory_path_distance(p.trajectory, t));
      dop.push_back(-scene.center_frequency_hz * trajectory_path_rate(p.trajectory, t) /
                    kSpeedOfLight);
    }
    truth.path_distance_m.push_back(std::move(dist));
    truth.doppler_hz.push_back(std::move(dop));
  }
  return result;
}

}  // namespace diffsense
