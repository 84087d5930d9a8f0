#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diffsense/common.hpp"
#include "diffsense/preprocess.hpp"
#include "diffsense/recording.hpp"

namespace diffsense {

// ---------------------------------------------------------------------------
// Ambient transmitter
// ---------------------------------------------------------------------------

struct DurationRange {
  double min_s = 0.0;
  double max_s = 0.0;
};

enum class Modulation { RandomQpsk, RandomComplexGaussian };

/// Bursty, non-cooperative transmitter. Bursts alternate with silent gaps;
/// both durations are drawn uniformly from their ranges.
struct TxBurstModel {
  DurationRange burst_duration{0.3e-3, 0.8e-3};
  DurationRange gap_duration{0.4e-3, 1.2e-3};
  double symbol_rate_hz = 1e6;
  Modulation modulation = Modulation::RandomQpsk;
  double power = 1.0;  // linear amplitude
  std::uint64_t seed = 1;
  double lead_in_s = 0.0;  // guaranteed silence before the first gap

  void validate() const;
};

/// One transmitted burst, in samples and in seconds of the true timeline.
struct Burst {
  std::size_t start = 0;
  std::size_t length = 0;
  double start_s = 0.0;
  double duration_s = 0.0;
};

struct TxBursts {
  std::vector<Complex> samples;  // exactly zero between bursts
  std::vector<Burst> schedule;   // strictly ordered, non-overlapping
};

TxBursts generate_tx_bursts(const TxBurstModel& model, double total_duration_s,
                            double sample_rate_hz);

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

/// Cosine-power directivity with a back-lobe floor:
/// g(theta) = max(floor, cos(theta - boresight)^exponent) in the front
/// hemisphere, floor behind it.
struct AntennaPattern {
  double boresight_rad = 0.0;
  double exponent = 2.0;
  double back_lobe_floor = 0.05;

  double gain(double arrival_angle_rad) const;
  void validate() const;
};

struct StaticPath {
  Complex amplitude{1.0, 0.0};
  double delay_s = 0.0;
  double arrival_angle_rad = 0.0;
};

enum class TrajectoryKind { ConstantVelocity, PiecewiseToAndFro, Sinusoidal };
enum class MotionDirection { Approaching, Receding };

/// Small periodic path-length oscillation superimposed on a trajectory
/// (limb swing on top of torso motion).
struct MicroMotion {
  double amplitude_m = 0.0;
  double frequency_hz = 0.0;
};

/// Path-length history d(t) of a moving scatterer.
///
/// Motion runs over [motion_start_s, motion_end_s]; before and after it the
/// path length is frozen. When round_trip is set the path length changes at
/// twice the target speed (transmitter and receiver both far from, and on
/// the same side of, the target).
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::ConstantVelocity;
  double speed_mps = 0.0;
  double segment_duration_s = 1.0;  // leg length, or period for Sinusoidal
  double initial_path_distance_m = 1.0;
  bool round_trip = true;
  MotionDirection start_direction = MotionDirection::Approaching;
  double motion_start_s = 0.0;
  double motion_end_s = std::numeric_limits<double>::infinity();
  std::optional<MicroMotion> micro_motion;

  void validate() const;
  /// Radial rate multiplier: 2 for round trip, 1 otherwise.
  double rate_factor() const { return round_trip ? 2.0 : 1.0; }
};

double trajectory_path_distance(const TrajectorySpec& trajectory, double t);

/// Analytic derivative of trajectory_path_distance (m/s).
double trajectory_path_rate(const TrajectorySpec& trajectory, double t);

/// Smallest path length reached over [0, horizon_s].
double trajectory_min_distance(const TrajectorySpec& trajectory, double horizon_s);

enum class AmplitudeModel { Constant, InverseDistance };

struct DynamicPath {
  TrajectorySpec trajectory;
  Complex base_amplitude{1.0, 0.0};  // amplitude at t = 0
  double arrival_angle_rad = 0.0;
  AmplitudeModel amplitude_model = AmplitudeModel::Constant;
  /// Delay applied to the signal envelope. Defaults to the initial path
  /// length over c; zero makes the path non-dispersive.
  std::optional<double> envelope_delay_s;
};

/// How often moving-path state is evaluated.
/// PerSample follows the motion within a burst; PerBurst freezes it at each
/// burst start (block fading).
enum class ChannelUpdate { PerSample, PerBurst };

/// Complex gain of a moving path at time t, including the carrier phase
/// exp(-j 2 pi f_c d(t) / c) and the receive antenna gain.
Complex dynamic_path_gain(const DynamicPath& path, const AntennaPattern& antenna,
                          double center_frequency_hz, double t);

/// Normal-incidence physical-optics field scattered by a flat rectangular
/// plate, observed at distance r.
struct PlateGeometry {
  double width_m = 0.1;
  double height_m = 0.1;
  double carrier_frequency_hz = 25.1e9;
  double incident_amplitude = 1.0;

  double wavenumber() const { return kTwoPi * carrier_frequency_hz / kSpeedOfLight; }
  void validate() const;
};

/// E^s = -j E0 (a b beta / 2 pi) e^{-j beta r} / r. Throws InvalidArgument
/// for r <= 0.
Complex plate_scattered_field(const PlateGeometry& plate, double r);

/// Scattered field of the plate sampled along a trajectory, r = d(t).
std::vector<Complex> plate_reference_series(const PlateGeometry& plate,
                                            const TrajectorySpec& trajectory,
                                            std::span<const double> times_s);

/// Dynamic path whose amplitude follows the plate's physical-optics field.
DynamicPath make_plate_path(const PlateGeometry& plate, const TrajectorySpec& trajectory,
                            double arrival_angle_rad);

// ---------------------------------------------------------------------------
// Receiver
// ---------------------------------------------------------------------------

/// Impairments shared by both receive chains (common LO, common device).
/// Phase noise is a Wiener process with the given Lorentzian linewidth.
struct CommonDistortion {
  double cfo_hz = 0.0;
  double phase_noise_linewidth_hz = 0.0;
  Complex device_response{1.0, 0.0};
  std::uint64_t seed = 2;

  void validate() const;
};

/// e^{j(2 pi cfo t + phi(t))} * H_dev for n samples.
std::vector<Complex> common_mode_factor(const CommonDistortion& distortion, std::size_t n,
                                        double sample_rate_hz);

/// Per-channel receiver impairments injected after the common factor.
struct ReceiverImpairment {
  Complex dc_offset{0.0, 0.0};
  ImbalanceParams imbalance;
};

/// AWGN referenced to the mean burst power of the clean reference channel.
/// Noise is added at the antenna side, ahead of the common-mode factor.
struct NoiseModel {
  std::optional<double> snr_db;
  std::uint64_t seed = 3;
};

struct AcquisitionModel {
  double block_duration_s = 1.0;
  double dead_time_s = 0.0;
  double sample_rate_hz = 1e6;

  void validate() const;
  std::size_t block_samples() const;
  std::size_t dead_samples() const;
  /// Fraction of wall-clock time that is recorded.
  double duty_ratio() const;
};

/// Maps a sample index of a gap-compressed recording back to the index it
/// had on the true (uncompressed) timeline.
std::size_t retained_to_true_index(const AcquisitionModel& acquisition, std::size_t retained);

/// Drops dead_time after every block_duration and concatenates the
/// survivors without timestamp gaps. Records duty ratio and the true time
/// scale in the metadata.
IQRecording apply_acquisition_model(const IQRecording& continuous,
                                    const AcquisitionModel& acquisition);

// ---------------------------------------------------------------------------
// Scene
// ---------------------------------------------------------------------------

struct Scene {
  std::string label = "custom";
  std::string analysis_profile = "human";  // processing defaults hint: "plate" or "human"
  double center_frequency_hz = 25.1e9;
  double duration_s = 1.0;
  TxBurstModel tx;
  AntennaPattern reference_antenna{0.0, 2.0, 0.05};
  AntennaPattern sensing_antenna{kPi, 2.0, 0.05};
  std::vector<StaticPath> reference_paths;
  std::vector<StaticPath> sensing_static_paths;
  std::vector<DynamicPath> dynamic_paths;
  ChannelUpdate dynamic_update = ChannelUpdate::PerSample;
  CommonDistortion distortion;
  NoiseModel noise;
  std::array<ReceiverImpairment, 2> impairments{};
  AcquisitionModel acquisition;  // carries the sample rate

  double sample_rate_hz() const { return acquisition.sample_rate_hz; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct ChannelPair {
  std::vector<Complex> channel1;
  std::vector<Complex> channel2;
};

/// Propagates the transmitted bursts through both channels, adds noise and
/// applies the common-mode distortion (the same realization on both
/// channels). Per-channel DC offset and I/Q imbalance are not applied here.
ChannelPair synthesize_channels(const Scene& scene, const TxBursts& tx);

/// Everything the simulator knows that the receiver does not.
struct GroundTruth {
  std::vector<Burst> bursts;
  double true_duration_s = 0.0;
  double retained_duration_s = 0.0;
  double duty_ratio = 1.0;
  double true_time_scale = 1.0;  // k_t that undoes the acquisition gaps
  std::vector<double> track_times_s;
  std::vector<std::vector<double>> path_distance_m;  // per dynamic path
  std::vector<std::vector<double>> doppler_hz;       // per dynamic path
};

nlohmann::json to_json(const GroundTruth& truth);

struct SimulationResult {
  IQRecording recording;
  GroundTruth truth;
};

/// Full chain: bursts, channels, impairments, acquisition gaps.
SimulationResult simulate_scene(const Scene& scene);

}  // namespace diffsense
