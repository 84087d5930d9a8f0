#include "diffsense/pipeline.hpp"

#include <cmath>

#include "diffsense/artifacts.hpp"
#include "diffsense/errors.hpp"
#include "diffsense/scene.hpp"
#include "diffsense/scene_config.hpp"
#include "json_reader.hpp"

namespace diffsense {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using detail::enum_name;
using detail::Node;
using detail::parse_enum;

const std::initializer_list<std::pair<const char*, CalibrationSource>> kCalibrationSources = {
    {"none", CalibrationSource::None},
    {"explicit", CalibrationSource::Explicit},
    {"event", CalibrationSource::Event},
    {"metadata", CalibrationSource::Metadata}};
const std::initializer_list<std::pair<const char*, IqCorrectionSource>> kIqSources = {
    {"none", IqCorrectionSource::None},
    {"metadata", IqCorrectionSource::Metadata},
    {"explicit", IqCorrectionSource::Explicit}};
const std::initializer_list<std::pair<const char*, WindowKind>> kWindows = {
    {"hann", WindowKind::Hann}, {"gaussian", WindowKind::Gaussian}, {"rect", WindowKind::Rect}};

std::size_t count(const Node& n, const std::string& key, std::size_t fallback) {
  if (!n.has(key)) return fallback;
  const double v = n.number(key);
  if (v < 0.0 || v != std::floor(v)) {
    throw ConfigError(n.field(key), "expected a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

ImbalanceParams imbalance_from(const Node& n) {
  n.allow_only({"gain_mismatch", "phase_mismatch_rad"});
  return {n.number("gain_mismatch", 1.0), n.number("phase_mismatch_rad", 0.0)};
}

json imbalance_json(const ImbalanceParams& p) {
  return {{"gain_mismatch", p.gain_mismatch}, {"phase_mismatch_rad", p.phase_mismatch_rad}};
}

}  // namespace

void PipelineConfig::validate() const {
  if (!input_recording.empty() && !input_scene.empty()) {
    throw ConfigError("input", "give either a recording or a scene, not both");
  }
  if (end_count == 0) throw ConfigError("end_count", "must be at least 1");
  if (!(percentile > 0.0) || percentile > 100.0) {
    throw ConfigError("percentile", "must lie in (0, 100]");
  }
  if (!(null_guard >= 0.0) || !std::isfinite(null_guard)) {
    throw ConfigError("null_guard", "must be finite and non-negative");
  }
  if (!thresholds.adaptive) {
    if (!(thresholds.end >= 0.0) || !(thresholds.start >= thresholds.end) ||
        !std::isfinite(thresholds.start)) {
      throw ConfigError("thresholds", "need 0 <= end <= start");
    }
  } else if (thresholds.adaptive_params.noise_prefix == 0 ||
             !(thresholds.adaptive_params.end_sigmas <= thresholds.adaptive_params.start_sigmas)) {
    throw ConfigError("thresholds", "adaptive mode needs a noise prefix and end <= start sigmas");
  }
  switch (calibration.source) {
    case CalibrationSource::Explicit:
      if (!(calibration.k_t > 0.0) || !std::isfinite(calibration.k_t)) {
        throw ConfigError("calibration.k_t", "must be positive");
      }
      break;
    case CalibrationSource::Event:
      if (!(calibration.event_duration_s > 0.0) || !std::isfinite(calibration.event_duration_s)) {
        throw ConfigError("calibration.event_duration_s", "must be positive");
      }
      break;
    default:
      break;
  }
  if (iq.source == IqCorrectionSource::Explicit) {
    for (std::size_t c = 0; c < 2; ++c) {
      try {
        iq.params[c].validate();
      } catch (const Error& e) {
        throw ConfigError("iq_correction.channel" + std::to_string(c + 1), e.what());
      }
    }
  }
  if (!(doppler_step_hz > 0.0) || !(doppler_max_hz >= 0.0) || !std::isfinite(doppler_max_hz)) {
    throw ConfigError("stft", "Doppler grid needs max >= 0 and step > 0");
  }
  if (doppler_max_hz / doppler_step_hz > 1e6) {
    throw ConfigError("stft.doppler_step_hz", "grid would exceed a million bins");
  }
  try {
    stft().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError("stft", e.what());
  }
  if (peaks_per_column == 0) throw ConfigError("peaks.per_column", "must be at least 1");
  if (!std::isfinite(peak_min_above_median_db)) {
    throw ConfigError("peaks.min_above_median_db", "must be finite");
  }
}

StftParams PipelineConfig::stft() const {
  StftParams p;
  p.window = window;
  p.window_span_s = window_span_s;
  p.hop_s = hop_s;
  p.doppler_grid_hz = doppler_grid(doppler_max_hz, doppler_step_hz);
  p.normalize = normalize;
  return p;
}

PipelineConfig default_pipeline_config(AnalysisProfile profile) {
  PipelineConfig c;
  if (profile == AnalysisProfile::Human) {
    c.window_span_s = 0.128;
    c.hop_s = 0.02;
    c.doppler_max_hz = 400.0;
    c.doppler_step_hz = 1.0;
  }
  return c;
}

AnalysisProfile parse_analysis_profile(const std::string& name) {
  if (name == "plate") return AnalysisProfile::Plate;
  if (name == "human") return AnalysisProfile::Human;
  throw ConfigError("profile", "unknown analysis profile \"" + name + "\" (plate, human)");
}

json to_json(const PipelineConfig& c) {
  json thresholds = {{"mode", c.thresholds.adaptive ? "adaptive" : "absolute"},
                     {"start", c.thresholds.start},
                     {"end", c.thresholds.end},
                     {"noise_prefix", c.thresholds.adaptive_params.noise_prefix},
                     {"start_sigmas", c.thresholds.adaptive_params.start_sigmas},
                     {"end_sigmas", c.thresholds.adaptive_params.end_sigmas}};
  return {
      {"input_recording", c.input_recording.generic_string()},
      {"input_scene", c.input_scene.generic_string()},
      {"dc_window", c.dc_window},
      {"iq_correction",
       {{"source", enum_name(c.iq.source, kIqSources)},
        {"channel1", imbalance_json(c.iq.params[0])},
        {"channel2", imbalance_json(c.iq.params[1])}}},
      {"thresholds", thresholds},
      {"end_count", c.end_count},
      {"percentile", c.percentile},
      {"null_guard", c.null_guard},
      {"calibration",
       {{"source", enum_name(c.calibration.source, kCalibrationSources)},
        {"k_t", c.calibration.k_t},
        {"event_duration_s", c.calibration.event_duration_s}}},
      {"stft",
       {{"window", enum_name(c.window, kWindows)},
        {"span_s", c.window_span_s},
        {"hop_s", c.hop_s},
        {"doppler_max_hz", c.doppler_max_hz},
        {"doppler_step_hz", c.doppler_step_hz},
        {"normalize", c.normalize}}},
      {"peaks",
       {{"per_column", c.peaks_per_column}, {"min_above_median_db", c.peak_min_above_median_db}}},
      {"output_dir", c.output_dir.generic_string()},
  };
}

PipelineConfig pipeline_config_from_json(const json& j) {
  if (j.is_object() && j.contains("config") && j.contains("results")) {
    return pipeline_config_from_json(j.at("config"));
  }
  const Node root(j, "");
  root.allow_only({"input_recording", "input_scene", "dc_window", "iq_correction", "thresholds",
                   "end_count", "percentile", "null_guard", "calibration", "stft", "peaks",
                   "output_dir"});
  PipelineConfig c;
  c.input_recording = root.text("input_recording", "");
  c.input_scene = root.text("input_scene", "");
  c.dc_window = count(root, "dc_window", c.dc_window);
  if (root.has("iq_correction")) {
    const Node n = root.child("iq_correction");
    n.allow_only({"source", "channel1", "channel2"});
    c.iq.source = parse_enum(n, "source", c.iq.source, kIqSources);
    if (n.has("channel1")) c.iq.params[0] = imbalance_from(n.child("channel1"));
    if (n.has("channel2")) c.iq.params[1] = imbalance_from(n.child("channel2"));
  }
  if (root.has("thresholds")) {
    const Node n = root.child("thresholds");
    n.allow_only({"mode", "start", "end", "noise_prefix", "start_sigmas", "end_sigmas"});
    c.thresholds.adaptive =
        parse_enum(n, "mode", true, {{"adaptive", true}, {"absolute", false}});
    c.thresholds.start = n.number("start", c.thresholds.start);
    c.thresholds.end = n.number("end", c.thresholds.end);
    auto& a = c.thresholds.adaptive_params;
    a.noise_prefix = count(n, "noise_prefix", a.noise_prefix);
    a.start_sigmas = n.number("start_sigmas", a.start_sigmas);
    a.end_sigmas = n.number("end_sigmas", a.end_sigmas);
  }
  c.end_count = count(root, "end_count", c.end_count);
  c.percentile = root.number("percentile", c.percentile);
  c.null_guard = root.number("null_guard", c.null_guard);
  if (root.has("calibration")) {
    const Node n = root.child("calibration");
    n.allow_only({"source", "k_t", "event_duration_s"});
    c.calibration.source = parse_enum(n, "source", c.calibration.source, kCalibrationSources);
    c.calibration.k_t = n.number("k_t", c.calibration.k_t);
    c.calibration.event_duration_s = n.number("event_duration_s", c.calibration.event_duration_s);
  }
  if (root.has("stft")) {
    const Node n = root.child("stft");
    n.allow_only({"window", "span_s", "hop_s", "doppler_max_hz", "doppler_step_hz", "normalize"});
    c.window = parse_enum(n, "window", c.window, kWindows);
    c.window_span_s = n.number("span_s", c.window_span_s);
    c.hop_s = n.number("hop_s", c.hop_s);
    c.doppler_max_hz = n.number("doppler_max_hz", c.doppler_max_hz);
    c.doppler_step_hz = n.number("doppler_step_hz", c.doppler_step_hz);
    c.normalize = n.boolean("normalize", c.normalize);
  }
  if (root.has("peaks")) {
    const Node n = root.child("peaks");
    n.allow_only({"per_column", "min_above_median_db"});
    c.peaks_per_column = count(n, "per_column", c.peaks_per_column);
    c.peak_min_above_median_db = n.number("min_above_median_db", c.peak_min_above_median_db);
  }
  c.output_dir = root.text("output_dir", c.output_dir.string());
  c.validate();
  return c;
}

namespace {

ImbalanceParams metadata_imbalance(const json& metadata, const std::string& channel) {
  const json& node = metadata.at("iq_calibration").at(channel);
  return {node.at("gain_mismatch").get<double>(), node.at("phase_mismatch_rad").get<double>()};
}

TimeCalibration resolve_calibration(const PipelineConfig& config, const IQRecording& recording,
                                    const RelativeChannelSeries& series, PipelineResult& result) {
  switch (config.calibration.source) {
    case CalibrationSource::None:
      return {};
    case CalibrationSource::Explicit:
      return {config.calibration.k_t};
    case CalibrationSource::Metadata: {
      const auto it = recording.metadata.find("duty_ratio");
      if (it == recording.metadata.end() || !it->is_number()) {
        throw ConfigError("calibration.source", "recording metadata has no duty_ratio");
      }
      try {
        return k_t_from_duty_ratio(it->get<double>());
      } catch (const InvalidArgument& e) {
        throw ConfigError("calibration.source", std::string("metadata duty_ratio: ") + e.what());
      }
    }
    case CalibrationSource::Event:
      result.measured_event_duration_s = measure_motion_leg_duration(series);
      return estimate_k_t(config.calibration.event_duration_s, result.measured_event_duration_s);
  }
  return {};
}

}  // namespace

PipelineResult run_pipeline(const IQRecording& input, const PipelineConfig& config) {
  config.validate();
  input.validate();
  if (input.size() == 0) throw EmptyResultError("no frames detected (empty recording)");

  IQRecording rec;
  if (config.dc_window > 0) {
    rec = remove_dc_offset(input, std::min(config.dc_window, input.size()));
  } else {
    rec = input;
  }

  switch (config.iq.source) {
    case IqCorrectionSource::None:
      break;
    case IqCorrectionSource::Explicit:
      rec = correct_iq_imbalance(rec, config.iq.params[0], config.iq.params[1]);
      break;
    case IqCorrectionSource::Metadata:
      if (rec.metadata.contains("iq_calibration")) {
        ImbalanceParams p1, p2;
        try {
          p1 = metadata_imbalance(rec.metadata, "channel1");
          p2 = metadata_imbalance(rec.metadata, "channel2");
        } catch (const json::exception& e) {
          throw ConfigError("iq_correction", std::string("malformed iq_calibration metadata: ") +
                                                 e.what());
        }
        rec = correct_iq_imbalance(rec, p1, p2);
      }
      break;
  }

  PipelineResult result;
  if (config.thresholds.adaptive) {
    result.segmentation = adaptive_segmentation_params(
        rec.channel1, config.thresholds.adaptive_params, config.end_count, config.percentile);
  } else {
    result.segmentation.start_threshold = config.thresholds.start;
    result.segmentation.end_threshold = config.thresholds.end;
    result.segmentation.end_count = config.end_count;
    result.segmentation.percentile = config.percentile;
  }
  result.frames = detect_frames(std::span<const ComplexF>(rec.channel1), result.segmentation);
  result.frames_detected = result.frames.size();
  if (result.frames.empty()) throw EmptyResultError("no frames detected");

  result.window_size = uniform_window_size(result.frames.durations, config.percentile);
  const AlignedFrameSet aligned = align_frames(rec, result.frames, result.window_size);
  result.frames_discarded = aligned.discarded;
  if (aligned.frames.empty()) throw EmptyResultError("no frames survived alignment");

  DifferentialResult diff;
  try {
    diff = compute_differential_series(aligned, {config.null_guard});
  } catch (const EmptyResultError&) {
    throw EmptyResultError("no usable frames: every frame failed the null guard");
  }
  result.frames_unusable = diff.unusable_frames;
  result.frames_retained = diff.series.size();
  result.static_baseline = diff.static_baseline;

  result.calibration = resolve_calibration(config, rec, diff.series, result);
  result.series = calibrate_timestamps(std::move(diff.series), result.calibration);

  const StftParams stft = config.stft();
  result.spectrogram = nu_stft(result.series, stft);
  result.global_spectrum = global_doppler_spectrum(result.series, stft.doppler_grid_hz);

  PeakOptions peaks;
  peaks.per_column = true;
  peaks.max_peaks = config.peaks_per_column;
  peaks.min_above_median_db = config.peak_min_above_median_db;
  result.peaks = peak_doppler(result.spectrogram, peaks);
  return result;
}

IQRecording load_pipeline_input(const PipelineConfig& config) {
  if (!config.input_recording.empty() && config.input_scene.empty()) {
    return read_recording(config.input_recording);
  }
  if (config.input_recording.empty() && !config.input_scene.empty()) {
    return simulate_scene(load_scene(config.input_scene)).recording;
  }
  throw ConfigError("input", "exactly one of input_recording and input_scene is required");
}

json make_manifest(const PipelineConfig& config, const PipelineResult& result,
                   const IQRecording& recording) {
  std::size_t low_support = 0;
  for (bool b : result.spectrogram.low_support) low_support += b ? 1 : 0;
  json global_peak = nullptr;
  if (!result.global_spectrum.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.global_spectrum.size(); ++i) {
      if (result.global_spectrum[i] > result.global_spectrum[best]) best = i;
    }
    global_peak = result.spectrogram.frequencies_hz[best];
  }
  return {
      {"tool", "diffsense"},
      {"version", DIFFSENSE_VERSION},
      {"config", to_json(config)},
      {"input",
       {{"sample_rate_hz", recording.sample_rate_hz},
        {"center_frequency_hz", recording.center_frequency_hz},
        {"sample_count", recording.size()},
        {"metadata", recording.metadata}}},
      {"results",
       {{"start_threshold", result.segmentation.start_threshold},
        {"end_threshold", result.segmentation.end_threshold},
        {"uniform_window_samples", result.window_size},
        {"frames_detected", result.frames_detected},
        {"frames_retained", result.frames_retained},
        {"frames_discarded", result.frames_discarded},
        {"frames_unusable", result.frames_unusable},
        {"k_t", result.calibration.k_t},
        {"measured_event_duration_s", result.measured_event_duration_s},
        {"static_baseline", {result.static_baseline.real(), result.static_baseline.imag()}},
        {"series_length", result.series.size()},
        {"spectrogram_rows", result.spectrogram.rows()},
        {"spectrogram_cols", result.spectrogram.cols()},
        {"low_support_columns", low_support},
        {"global_peak_hz", global_peak}}},
      {"outputs",
       {"spectrogram.csv", "spectrogram.cf32", "spectrogram.json", "series.csv", "frames.csv",
        "peaks.csv", "global_spectrum.csv"}},
  };
}

void write_pipeline_outputs(const PipelineConfig& config, const PipelineResult& result,
                            const IQRecording& recording) {
  const fs::path dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  write_spectrogram_csv(dir / "spectrogram.csv", result.spectrogram);
  write_spectrogram_binary(dir / "spectrogram", result.spectrogram,
                           {{"center_frequency_hz", recording.center_frequency_hz},
                            {"k_t", result.calibration.k_t}});
  write_series_csv(dir / "series.csv", result.series);
  write_frame_table_csv(dir / "frames.csv", result.frames);
  write_peaks_csv(dir / "peaks.csv", result.peaks, recording.center_frequency_hz);
  write_global_spectrum_csv(dir / "global_spectrum.csv", result.spectrogram.frequencies_hz,
                            result.global_spectrum);
  write_json_file(dir / "manifest.json", make_manifest(config, result, recording));
}

}  // namespace diffsense
