#include "diffsense/presets.hpp"

#include <functional>
#include <utility>

#include "diffsense/errors.hpp"

namespace diffsense {

namespace {

constexpr double kCarrier = 25.1e9;
constexpr double kSampleRate = 1e6;

// Round-trip path speed that maps to a given Doppler shift.
constexpr double kPlateSpeed = 0.03125;  // m/s, 5.23 Hz at 25.1 GHz

double delay_of(double path_m) { return path_m / kSpeedOfLight; }

Scene indoor_room(std::string label, std::string profile, double duration_s) {
  Scene s;
  s.label = std::move(label);
  s.analysis_profile = std::move(profile);
  s.center_frequency_hz = kCarrier;
  s.duration_s = duration_s;
  s.acquisition.sample_rate_hz = kSampleRate;
  s.acquisition.block_duration_s = duration_s;
  s.acquisition.dead_time_s = 0.0;

  s.tx.symbol_rate_hz = kSampleRate;
  s.tx.modulation = Modulation::RandomQpsk;
  s.tx.power = 1.0;
  s.tx.seed = 11;
  s.tx.lead_in_s = 0.01;

  // Reference receiver faces the transmitter: strong line of sight plus
  // weaker floor and side-wall bounces.
  s.reference_paths = {
      {{1.0, 0.0}, delay_of(2.2), 0.0},
      {std::polar(0.3, 1.1), delay_of(2.9), 0.3},
      {std::polar(0.15, -2.0), delay_of(4.1), -0.6},
  };
  // Sensing receiver faces away: the direct path enters through the back
  // lobe, wall reflections arrive near boresight.
  s.sensing_static_paths = {
      {{1.0, 0.0}, delay_of(2.2), 0.0},
      {std::polar(0.4, 0.7), delay_of(3.6), 2.8},
      {std::polar(0.2, -1.3), delay_of(5.0), -2.6},
  };

  s.distortion.cfo_hz = 1000.0;
  s.distortion.phase_noise_linewidth_hz = 50.0;
  s.distortion.device_response = std::polar(0.8, 0.6);
  s.distortion.seed = 21;
  s.noise.snr_db = 30.0;
  s.noise.seed = 31;
  s.impairments[0] = {{0.02, -0.01}, {1.03, 0.04}};
  s.impairments[1] = {{-0.015, 0.02}, {0.97, -0.03}};
  return s;
}

Scene plate_room(std::string label, double duration_s) {
  Scene s = indoor_room(std::move(label), "plate", duration_s);
  s.tx.burst_duration = {0.3e-3, 0.8e-3};
  s.tx.gap_duration = {0.4e-3, 1.2e-3};
  // Recorder keeps 19 ms out of every 32 ms.
  s.acquisition.block_duration_s = 19e-3;
  s.acquisition.dead_time_s = 13e-3;
  return s;
}

PlateGeometry plate() {
  PlateGeometry p;
  p.width_m = 0.1;
  p.height_m = 0.1;
  p.carrier_frequency_hz = kCarrier;
  p.incident_amplitude = 0.4;
  return p;
}

Scene plate_to_and_fro() {
  Scene s = plate_room("plate-to-and-fro", 12.8);
  TrajectorySpec t;
  t.kind = TrajectoryKind::PiecewiseToAndFro;
  t.speed_mps = kPlateSpeed;
  t.segment_duration_s = 3.2;
  t.initial_path_distance_m = 3.3;
  t.round_trip = true;
  t.start_direction = MotionDirection::Approaching;
  s.dynamic_paths.push_back(make_plate_path(plate(), t, kPi));
  return s;
}

Scene plate_continuous() {
  Scene s = plate_room("plate-continuous", 9.6);
  TrajectorySpec t;
  t.kind = TrajectoryKind::ConstantVelocity;
  t.speed_mps = kPlateSpeed;
  t.initial_path_distance_m = 3.3;
  t.round_trip = true;
  t.start_direction = MotionDirection::Approaching;
  s.dynamic_paths.push_back(make_plate_path(plate(), t, kPi));
  return s;
}

Scene static_background() { return plate_room("static-background", 12.8); }

Scene human_room(std::string label, double duration_s) {
  Scene s = indoor_room(std::move(label), "human", duration_s);
  // Denser traffic so frame timestamps resolve a few hundred Hz.
  s.tx.burst_duration = {0.1e-3, 0.3e-3};
  s.tx.gap_duration = {0.1e-3, 0.4e-3};
  return s;
}

// Walking speeds whose round-trip Doppler lands on 200 Hz and 50 Hz.
constexpr double kWalkSpeed = 1.1943922629482;
constexpr double kSlowSpeed = 0.2985980657371;

DynamicPath body(TrajectorySpec t, Complex amplitude, AmplitudeModel model) {
  DynamicPath p;
  p.trajectory = std::move(t);
  p.base_amplitude = amplitude;
  p.arrival_angle_rad = kPi;
  p.amplitude_model = model;
  return p;
}

Scene unidirectional_walk() {
  Scene s = human_room("unidirectional-walk", 4.0);
  TrajectorySpec t;
  t.kind = TrajectoryKind::ConstantVelocity;
  t.speed_mps = kWalkSpeed;
  t.initial_path_distance_m = 10.0;
  t.start_direction = MotionDirection::Approaching;
  t.motion_start_s = 0.0;
  t.motion_end_s = 3.0;
  s.dynamic_paths.push_back(body(t, std::polar(0.08, 0.4), AmplitudeModel::InverseDistance));
  return s;
}

Scene hand_wave() {
  Scene s = human_room("hand-wave", 3.0);
  TrajectorySpec t;
  t.kind = TrajectoryKind::Sinusoidal;
  t.speed_mps = 2.0901864601594;  // peak; 350 Hz
  t.segment_duration_s = 0.5;
  t.initial_path_distance_m = 1.0;
  s.dynamic_paths.push_back(body(t, std::polar(0.06, -0.9), AmplitudeModel::Constant));
  return s;
}

Scene back_and_forth_walk() {
  Scene s = human_room("back-and-forth-walk", 6.0);
  TrajectorySpec t;
  t.kind = TrajectoryKind::PiecewiseToAndFro;
  t.speed_mps = kWalkSpeed;
  t.segment_duration_s = 1.5;
  t.initial_path_distance_m = 5.0;
  t.micro_motion = MicroMotion{0.05, 1.8};
  s.dynamic_paths.push_back(body(t, std::polar(0.08, 0.4), AmplitudeModel::Constant));
  return s;
}

Scene two_target() {
  Scene s = human_room("two-target", 6.0);
  TrajectorySpec far;
  far.kind = TrajectoryKind::PiecewiseToAndFro;
  far.speed_mps = kWalkSpeed;
  far.segment_duration_s = 2.0;
  far.initial_path_distance_m = 5.0;
  TrajectorySpec near = far;
  near.speed_mps = kSlowSpeed;
  near.segment_duration_s = 1.5;
  near.initial_path_distance_m = 1.5;
  near.start_direction = MotionDirection::Receding;
  s.dynamic_paths.push_back(body(far, std::polar(0.08, 0.4), AmplitudeModel::Constant));
  s.dynamic_paths.push_back(body(near, std::polar(0.05, 2.1), AmplitudeModel::Constant));
  return s;
}

const std::vector<std::pair<std::string, std::function<Scene()>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<Scene()>>> r = {
      {"plate-to-and-fro", plate_to_and_fro},
      {"plate-continuous", plate_continuous},
      {"static-background", static_background},
      {"unidirectional-walk", unidirectional_walk},
      {"hand-wave", hand_wave},
      {"back-and-forth-walk", back_and_forth_walk},
      {"two-target", two_target},
  };
  return r;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

Scene preset_scene(std::string_view name) {
  for (const auto& [n, fn] : registry()) {
    if (n == name) return fn();
  }
  std::string known;
  for (const auto& [n, fn] : registry()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("preset", "unknown preset \"" + std::string(name) + "\" (known: " + known + ")");
}

}  // namespace diffsense
