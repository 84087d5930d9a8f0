#include "diffsense/scene_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>

#include "diffsense/errors.hpp"
#include "json_reader.hpp"

namespace diffsense {

namespace {

using nlohmann::json;
using detail::Node;
using detail::parse_enum;
using detail::enum_name;

const std::initializer_list<std::pair<const char*, Modulation>> kModulations = {
    {"qpsk", Modulation::RandomQpsk}, {"gaussian", Modulation::RandomComplexGaussian}};
const std::initializer_list<std::pair<const char*, TrajectoryKind>> kKinds = {
    {"constant-velocity", TrajectoryKind::ConstantVelocity},
    {"to-and-fro", TrajectoryKind::PiecewiseToAndFro},
    {"sinusoidal", TrajectoryKind::Sinusoidal}};
const std::initializer_list<std::pair<const char*, MotionDirection>> kDirections = {
    {"approaching", MotionDirection::Approaching}, {"receding", MotionDirection::Receding}};
const std::initializer_list<std::pair<const char*, AmplitudeModel>> kAmplitudeModels = {
    {"constant", AmplitudeModel::Constant}, {"inverse-distance", AmplitudeModel::InverseDistance}};
const std::initializer_list<std::pair<const char*, ChannelUpdate>> kUpdates = {
    {"per-sample", ChannelUpdate::PerSample}, {"per-burst", ChannelUpdate::PerBurst}};

DurationRange parse_range(const Node& parent, const std::string& key, DurationRange fallback) {
  if (!parent.has(key)) return fallback;
  const Node n = parent.child(key);
  n.allow_only({"min", "max"});
  return {n.number("min"), n.number("max")};
}

AntennaPattern parse_antenna(const Node& n, AntennaPattern a) {
  n.allow_only({"boresight_rad", "exponent", "back_lobe_floor"});
  a.boresight_rad = n.number("boresight_rad", a.boresight_rad);
  a.exponent = n.number("exponent", a.exponent);
  a.back_lobe_floor = n.number("back_lobe_floor", a.back_lobe_floor);
  return a;
}

std::vector<StaticPath> parse_static_paths(const Node& parent, const std::string& key) {
  std::vector<StaticPath> paths;
  if (!parent.has(key)) return paths;
  const json& arr = parent.array(key);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Node n(arr[i], parent.field(key) + "[" + std::to_string(i) + "]");
    n.allow_only({"amplitude", "delay_s", "arrival_angle_rad"});
    StaticPath p;
    p.amplitude = n.complex("amplitude", p.amplitude);
    p.delay_s = n.number("delay_s", 0.0);
    p.arrival_angle_rad = n.number("arrival_angle_rad", 0.0);
    paths.push_back(p);
  }
  return paths;
}

TrajectorySpec parse_trajectory(const Node& n) {
  n.allow_only({"kind", "speed_mps", "segment_duration_s", "initial_path_distance_m",
                "round_trip", "start_direction", "motion_start_s", "motion_end_s",
                "micro_motion"});
  TrajectorySpec t;
  t.kind = parse_enum(n, "kind", t.kind, kKinds);
  t.speed_mps = n.number("speed_mps", t.speed_mps);
  t.segment_duration_s = n.number("segment_duration_s", t.segment_duration_s);
  t.initial_path_distance_m = n.number("initial_path_distance_m");
  t.round_trip = n.boolean("round_trip", t.round_trip);
  t.start_direction = parse_enum(n, "start_direction", t.start_direction, kDirections);
  t.motion_start_s = n.number("motion_start_s", t.motion_start_s);
  t.motion_end_s = n.number("motion_end_s", t.motion_end_s);
  if (n.has("micro_motion")) {
    const Node m = n.child("micro_motion");
    m.allow_only({"amplitude_m", "frequency_hz"});
    t.micro_motion = MicroMotion{m.number("amplitude_m"), m.number("frequency_hz")};
  }
  return t;
}

std::vector<DynamicPath> parse_dynamic_paths(const Node& parent, double center_frequency_hz) {
  std::vector<DynamicPath> paths;
  if (!parent.has("dynamic_paths")) return paths;
  const json& arr = parent.array("dynamic_paths");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Node n(arr[i], "dynamic_paths[" + std::to_string(i) + "]");
    n.allow_only({"trajectory", "amplitude", "plate", "arrival_angle_rad", "amplitude_model",
                  "envelope_delay_s"});
    std::optional<double> envelope_delay;
    if (n.has("envelope_delay_s")) envelope_delay = n.number("envelope_delay_s");
    if (!n.has("trajectory")) throw ConfigError(n.field("trajectory"), "required field is missing");
    const TrajectorySpec traj = parse_trajectory(n.child("trajectory"));
    const double angle = n.number("arrival_angle_rad", 0.0);
    if (n.has("plate")) {
      if (n.has("amplitude") || n.has("amplitude_model")) {
        throw ConfigError(n.field("plate"), "a plate path takes its amplitude from the plate");
      }
      const Node p = n.child("plate");
      p.allow_only({"width_m", "height_m", "incident_amplitude", "carrier_frequency_hz"});
      PlateGeometry plate;
      plate.width_m = p.number("width_m", plate.width_m);
      plate.height_m = p.number("height_m", plate.height_m);
      plate.incident_amplitude = p.number("incident_amplitude", plate.incident_amplitude);
      plate.carrier_frequency_hz = p.number("carrier_frequency_hz", center_frequency_hz);
      try {
        paths.push_back(make_plate_path(plate, traj, angle));
        paths.back().envelope_delay_s = envelope_delay;
      } catch (const InvalidArgument& e) {
        throw ConfigError(n.field("plate"), e.what());
      }
      continue;
    }
    DynamicPath d;
    d.trajectory = traj;
    d.base_amplitude = n.complex("amplitude", d.base_amplitude);
    d.arrival_angle_rad = angle;
    d.amplitude_model = parse_enum(n, "amplitude_model", d.amplitude_model, kAmplitudeModels);
    d.envelope_delay_s = envelope_delay;
    paths.push_back(d);
  }
  return paths;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json antenna_json(const AntennaPattern& a) {
  return {{"boresight_rad", a.boresight_rad},
          {"exponent", a.exponent},
          {"back_lobe_floor", a.back_lobe_floor}};
}

json static_paths_json(const std::vector<StaticPath>& paths) {
  json arr = json::array();
  for (const auto& p : paths) {
    arr.push_back({{"amplitude", complex_json(p.amplitude)},
                   {"delay_s", p.delay_s},
                   {"arrival_angle_rad", p.arrival_angle_rad}});
  }
  return arr;
}

}  // namespace

Scene scene_from_json(const nlohmann::json& j) {
  const Node root(j, "");
  root.allow_only({"label", "analysis_profile", "center_frequency_hz", "duration_s",
                   "sample_rate_hz", "tx", "antennas", "reference_paths", "sensing_static_paths",
                   "dynamic_paths", "dynamic_update", "distortion", "noise", "impairments",
                   "acquisition"});
  Scene s;
  s.label = root.text("label", s.label);
  s.analysis_profile = root.text("analysis_profile", s.analysis_profile);
  s.center_frequency_hz = root.number("center_frequency_hz", s.center_frequency_hz);
  s.duration_s = root.number("duration_s");
  s.acquisition.sample_rate_hz = root.number("sample_rate_hz", s.acquisition.sample_rate_hz);

  if (root.has("tx")) {
    const Node n = root.child("tx");
    n.allow_only({"burst_duration_s", "gap_duration_s", "symbol_rate_hz", "modulation", "power",
                  "seed", "lead_in_s"});
    s.tx.burst_duration = parse_range(n, "burst_duration_s", s.tx.burst_duration);
    s.tx.gap_duration = parse_range(n, "gap_duration_s", s.tx.gap_duration);
    s.tx.symbol_rate_hz = n.number("symbol_rate_hz", s.tx.symbol_rate_hz);
    s.tx.modulation = parse_enum(n, "modulation", s.tx.modulation, kModulations);
    s.tx.power = n.number("power", s.tx.power);
    s.tx.seed = n.seed("seed", s.tx.seed);
    s.tx.lead_in_s = n.number("lead_in_s", s.tx.lead_in_s);
  }
  if (root.has("antennas")) {
    const Node n = root.child("antennas");
    n.allow_only({"reference", "sensing"});
    if (n.has("reference")) s.reference_antenna = parse_antenna(n.child("reference"), s.reference_antenna);
    if (n.has("sensing")) s.sensing_antenna = parse_antenna(n.child("sensing"), s.sensing_antenna);
  }
  s.reference_paths = parse_static_paths(root, "reference_paths");
  s.sensing_static_paths = parse_static_paths(root, "sensing_static_paths");
  s.dynamic_paths = parse_dynamic_paths(root, s.center_frequency_hz);
  s.dynamic_update = parse_enum(root, "dynamic_update", s.dynamic_update, kUpdates);

  if (root.has("distortion")) {
    const Node n = root.child("distortion");
    n.allow_only({"cfo_hz", "phase_noise_linewidth_hz", "device_response", "seed"});
    s.distortion.cfo_hz = n.number("cfo_hz", s.distortion.cfo_hz);
    s.distortion.phase_noise_linewidth_hz =
        n.number("phase_noise_linewidth_hz", s.distortion.phase_noise_linewidth_hz);
    s.distortion.device_response = n.complex("device_response", s.distortion.device_response);
    s.distortion.seed = n.seed("seed", s.distortion.seed);
  }
  if (root.has("noise")) {
    const Node n = root.child("noise");
    n.allow_only({"snr_db", "seed"});
    if (n.has("snr_db")) s.noise.snr_db = n.number("snr_db");
    s.noise.seed = n.seed("seed", s.noise.seed);
  }
  if (root.has("impairments")) {
    const json& arr = root.array("impairments");
    if (arr.size() != 2) throw ConfigError("impairments", "expected one entry per channel");
    for (std::size_t c = 0; c < 2; ++c) {
      const Node n(arr[c], "impairments[" + std::to_string(c) + "]");
      n.allow_only({"dc_offset", "gain_mismatch", "phase_mismatch_rad"});
      s.impairments[c].dc_offset = n.complex("dc_offset", {});
      s.impairments[c].imbalance.gain_mismatch = n.number("gain_mismatch", 1.0);
      s.impairments[c].imbalance.phase_mismatch_rad = n.number("phase_mismatch_rad", 0.0);
    }
  }
  if (root.has("acquisition")) {
    const Node n = root.child("acquisition");
    n.allow_only({"block_duration_s", "dead_time_s"});
    s.acquisition.block_duration_s = n.number("block_duration_s", s.acquisition.block_duration_s);
    s.acquisition.dead_time_s = n.number("dead_time_s", s.acquisition.dead_time_s);
  } else {
    s.acquisition.block_duration_s = s.duration_s;
  }
  s.validate();
  return s;
}

nlohmann::json scene_to_json(const Scene& s) {
  json dyn = json::array();
  for (const auto& p : s.dynamic_paths) {
    const auto& t = p.trajectory;
    json traj = {{"kind", enum_name(t.kind, kKinds)},
                 {"speed_mps", t.speed_mps},
                 {"segment_duration_s", t.segment_duration_s},
                 {"initial_path_distance_m", t.initial_path_distance_m},
                 {"round_trip", t.round_trip},
                 {"start_direction", enum_name(t.start_direction, kDirections)},
                 {"motion_start_s", t.motion_start_s}};
    if (std::isfinite(t.motion_end_s)) traj["motion_end_s"] = t.motion_end_s;
    if (t.micro_motion) {
      traj["micro_motion"] = {{"amplitude_m", t.micro_motion->amplitude_m},
                              {"frequency_hz", t.micro_motion->frequency_hz}};
    }
    json path = {{"trajectory", traj},
                 {"amplitude", complex_json(p.base_amplitude)},
                 {"arrival_angle_rad", p.arrival_angle_rad},
                 {"amplitude_model", enum_name(p.amplitude_model, kAmplitudeModels)}};
    if (p.envelope_delay_s) path["envelope_delay_s"] = *p.envelope_delay_s;
    dyn.push_back(path);
  }
  json impairments = json::array();
  for (const auto& imp : s.impairments) {
    impairments.push_back({{"dc_offset", complex_json(imp.dc_offset)},
                           {"gain_mismatch", imp.imbalance.gain_mismatch},
                           {"phase_mismatch_rad", imp.imbalance.phase_mismatch_rad}});
  }
  json noise = {{"seed", s.noise.seed}};
  if (s.noise.snr_db) noise["snr_db"] = *s.noise.snr_db;

  return {
      {"label", s.label},
      {"analysis_profile", s.analysis_profile},
      {"center_frequency_hz", s.center_frequency_hz},
      {"duration_s", s.duration_s},
      {"sample_rate_hz", s.sample_rate_hz()},
      {"tx",
       {{"burst_duration_s", {{"min", s.tx.burst_duration.min_s}, {"max", s.tx.burst_duration.max_s}}},
        {"gap_duration_s", {{"min", s.tx.gap_duration.min_s}, {"max", s.tx.gap_duration.max_s}}},
        {"symbol_rate_hz", s.tx.symbol_rate_hz},
        {"modulation", enum_name(s.tx.modulation, kModulations)},
        {"power", s.tx.power},
        {"seed", s.tx.seed},
        {"lead_in_s", s.tx.lead_in_s}}},
      {"antennas",
       {{"reference", antenna_json(s.reference_antenna)},
        {"sensing", antenna_json(s.sensing_antenna)}}},
      {"reference_paths", static_paths_json(s.reference_paths)},
      {"sensing_static_paths", static_paths_json(s.sensing_static_paths)},
      {"dynamic_paths", dyn},
      {"dynamic_update", enum_name(s.dynamic_update, kUpdates)},
      {"distortion",
       {{"cfo_hz", s.distortion.cfo_hz},
        {"phase_noise_linewidth_hz", s.distortion.phase_noise_linewidth_hz},
        {"device_response", complex_json(s.distortion.device_response)},
        {"seed", s.distortion.seed}}},
      {"noise", noise},
      {"impairments", impairments},
      {"acquisition",
       {{"block_duration_s", s.acquisition.block_duration_s},
        {"dead_time_s", s.acquisition.dead_time_s}}},
  };
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open scene file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", "scene file " + path.string() + " is not valid JSON: " + e.what());
  }
  return scene_from_json(j);
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write scene file " + path.string());
  out << scene_to_json(scene).dump(2) << '\n';
}

}  // namespace diffsense
