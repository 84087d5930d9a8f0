#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diffsense/differential.hpp"
#include "diffsense/doppler.hpp"
#include "diffsense/preprocess.hpp"
#include "diffsense/recording.hpp"
#include "diffsense/segmentation.hpp"

namespace diffsense {

enum class CalibrationSource { None, Explicit, Event, Metadata };

struct CalibrationConfig {
  CalibrationSource source = CalibrationSource::None;
  double k_t = 1.0;               // Explicit
  double event_duration_s = 0.0;  // Event: true duration of one motion leg
};

enum class IqCorrectionSource { None, Metadata, Explicit };

struct IqCorrectionConfig {
  IqCorrectionSource source = IqCorrectionSource::Metadata;
  std::array<ImbalanceParams, 2> params{};  // Explicit
};

struct ThresholdConfig {
  bool adaptive = true;
  double start = 0.5;  // absolute thresholds when not adaptive
  double end = 0.3;
  AdaptiveThresholds adaptive_params;
};

enum class AnalysisProfile { Plate, Human };

/// Everything that determines a processing run. Serializes losslessly to
/// the manifest, so a manifest can be fed back as a config.
struct PipelineConfig {
  std::filesystem::path input_recording;  // exactly one of these two
  std::filesystem::path input_scene;

  std::size_t dc_window = kDefaultDcWindow;  // 0 disables DC removal
  IqCorrectionConfig iq;
  ThresholdConfig thresholds;
  std::size_t end_count = kDefaultEndCount;
  double percentile = kDefaultPercentile;
  double null_guard = kDefaultNullGuard;
  CalibrationConfig calibration;

  WindowKind window = WindowKind::Hann;
  double window_span_s = 1.0;
  double hop_s = 0.1;
  double doppler_max_hz = 15.0;
  double doppler_step_hz = 0.05;
  bool normalize = true;

  std::size_t peaks_per_column = 2;
  double peak_min_above_median_db = 15.0;

  std::filesystem::path output_dir = "out";

  /// Throws ConfigError naming the offending field.
  void validate() const;
  StftParams stft() const;
};

PipelineConfig default_pipeline_config(AnalysisProfile profile);
AnalysisProfile parse_analysis_profile(const std::string& name);

nlohmann::json to_json(const PipelineConfig& config);

/// Accepts a bare config object or a run manifest (uses its "config").
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

struct PipelineResult {
  SegmentationParams segmentation;  // thresholds actually used
  FrameTable frames;
  std::size_t window_size = 0;
  std::size_t frames_detected = 0;
  std::size_t frames_retained = 0;
  std::size_t frames_discarded = 0;
  std::size_t frames_unusable = 0;
  double measured_event_duration_s = 0.0;  // Event calibration only
  TimeCalibration calibration;
  Complex static_baseline{0.0, 0.0};
  RelativeChannelSeries series;  // calibrated timestamps
  DopplerSpectrogram spectrogram;
  std::vector<double> global_spectrum;
  std::vector<DopplerPeak> peaks;
};

/// Preprocessing, segmentation, differential channel, calibration and
/// NU-STFT. Throws EmptyResultError ("no frames detected", "no usable
/// frames") and ConfigError for an inconsistent calibration source.
PipelineResult run_pipeline(const IQRecording& recording, const PipelineConfig& config);

/// Reads the recording, or simulates the scene, named by the config.
IQRecording load_pipeline_input(const PipelineConfig& config);

nlohmann::json make_manifest(const PipelineConfig& config, const PipelineResult& result,
                             const IQRecording& recording);

/// Writes spectrogram.csv, spectrogram.cf32/.json, series.csv, frames.csv,
/// peaks.csv, global_spectrum.csv and manifest.json into config.output_dir.
void write_pipeline_outputs(const PipelineConfig& config, const PipelineResult& result,
                            const IQRecording& recording);

}  // namespace diffsense
