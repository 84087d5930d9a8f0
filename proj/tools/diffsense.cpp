// diffsense: simulate, process and summarize two-channel passive captures.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "diffsense/artifacts.hpp"
#include "diffsense/errors.hpp"
#include "diffsense/pipeline.hpp"
#include "diffsense/presets.hpp"
#include "diffsense/report.hpp"
#include "diffsense/scene.hpp"
#include "diffsense/scene_config.hpp"

namespace fs = std::filesystem;
using namespace diffsense;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kIo = 3, kEmpty = 4 };

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string scene_path;
  std::string preset;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string dump_scene;
  bool list = false;
};

int run_simulate(const SimulateArgs& a) {
  if (a.list) {
    for (const auto& n : preset_names()) std::cout << n << '\n';
    return kOk;
  }
  if (a.scene_path.empty() == a.preset.empty()) {
    throw ConfigError("scene", "give exactly one of --scene and --preset");
  }
  Scene scene = a.preset.empty() ? load_scene(a.scene_path) : preset_scene(a.preset);
  if (a.seed) {
    scene.tx.seed = *a.seed;
    scene.distortion.seed = *a.seed + 1;
    scene.noise.seed = *a.seed + 2;
  }
  if (!a.dump_scene.empty()) {
    save_scene(scene, a.dump_scene);
    if (a.out_dir.empty()) return kOk;
  }
  if (a.out_dir.empty()) throw ConfigError("out", "--out is required");

  const SimulationResult sim = simulate_scene(scene);
  fs::create_directories(a.out_dir);
  write_recording(sim.recording, fs::path(a.out_dir) / "recording.json");
  write_json_file(fs::path(a.out_dir) / "ground_truth.json", to_json(sim.truth));
  save_scene(scene, fs::path(a.out_dir) / "scene.json");

  std::printf("scene        %s\n", scene.label.c_str());
  std::printf("duration     %.3f s true, %.3f s recorded\n", sim.truth.true_duration_s,
              sim.truth.retained_duration_s);
  std::printf("bursts       %zu\n", sim.truth.bursts.size());
  std::printf("duty ratio   %.6f\n", sim.truth.duty_ratio);
  std::printf("written to   %s\n", a.out_dir.c_str());
  return kOk;
}

// ---------------------------------------------------------------------------
// process
// ---------------------------------------------------------------------------

struct ProcessArgs {
  std::string input, scene, config, out_dir;
  std::string profile = "auto";
  std::string calibration = "auto";
  std::string iq;
  std::string window;
  std::optional<double> span, hop, doppler_max, doppler_step;
  bool raw = false;
  std::string thresholds;
  std::optional<std::size_t> end_count, dc_window, peaks;
  std::optional<double> percentile, null_guard;
};

CalibrationConfig parse_calibration(const std::string& s, const IQRecording& rec) {
  CalibrationConfig c;
  if (s == "auto") {
    c.source = rec.metadata.contains("duty_ratio") ? CalibrationSource::Metadata
                                                    : CalibrationSource::None;
  } else if (s == "none") {
    c.source = CalibrationSource::None;
  } else if (s == "metadata") {
    c.source = CalibrationSource::Metadata;
  } else if (s.rfind("kt:", 0) == 0) {
    c.source = CalibrationSource::Explicit;
    c.k_t = std::stod(s.substr(3));
  } else if (s.rfind("event:", 0) == 0) {
    c.source = CalibrationSource::Event;
    c.event_duration_s = std::stod(s.substr(6));
  } else {
    throw ConfigError("calibration", "expected auto, none, metadata, kt:<value> or event:<seconds>");
  }
  return c;
}

ThresholdConfig parse_thresholds(const std::string& s, ThresholdConfig t) {
  if (s == "adaptive") {
    t.adaptive = true;
    return t;
  }
  const auto comma = s.find(',');
  if (comma == std::string::npos) {
    throw ConfigError("thresholds", "expected \"adaptive\" or START,END");
  }
  t.adaptive = false;
  t.start = std::stod(s.substr(0, comma));
  t.end = std::stod(s.substr(comma + 1));
  return t;
}

WindowKind parse_window(const std::string& s) {
  if (s == "hann") return WindowKind::Hann;
  if (s == "gaussian") return WindowKind::Gaussian;
  if (s == "rect") return WindowKind::Rect;
  throw ConfigError("window", "expected hann, gaussian or rect");
}

int run_process(const ProcessArgs& a) {
  const int sources = !a.input.empty() + !a.scene.empty() + !a.config.empty();
  if (sources != 1) throw ConfigError("input", "give exactly one of --input, --scene, --config");

  PipelineConfig config;
  IQRecording rec;
  if (!a.config.empty()) {
    config = pipeline_config_from_json(read_json_file(a.config));
    rec = load_pipeline_input(config);
  } else {
    PipelineConfig probe;
    if (!a.input.empty()) {
      probe.input_recording = fs::weakly_canonical(fs::absolute(a.input));
    } else {
      probe.input_scene = fs::weakly_canonical(fs::absolute(a.scene));
    }
    rec = load_pipeline_input(probe);

    std::string profile = a.profile;
    if (profile == "auto") {
      profile = rec.metadata.value("analysis_profile", std::string("human"));
    }
    config = default_pipeline_config(parse_analysis_profile(profile));
    config.input_recording = probe.input_recording;
    config.input_scene = probe.input_scene;
    config.calibration = parse_calibration(a.calibration, rec);
  }
  if (!a.config.empty() && a.calibration != "auto") {
    config.calibration = parse_calibration(a.calibration, rec);
  }
  if (!a.iq.empty()) {
    if (a.iq == "metadata") {
      config.iq.source = IqCorrectionSource::Metadata;
    } else if (a.iq == "none") {
      config.iq.source = IqCorrectionSource::None;
    } else {
      throw ConfigError("iq", "expected metadata or none");
    }
  }
  if (!a.window.empty()) config.window = parse_window(a.window);
  if (a.span) config.window_span_s = *a.span;
  if (a.hop) config.hop_s = *a.hop;
  if (a.doppler_max) config.doppler_max_hz = *a.doppler_max;
  if (a.doppler_step) config.doppler_step_hz = *a.doppler_step;
  if (a.raw) config.normalize = false;
  if (!a.thresholds.empty()) config.thresholds = parse_thresholds(a.thresholds, config.thresholds);
  if (a.end_count) config.end_count = *a.end_count;
  if (a.dc_window) config.dc_window = *a.dc_window;
  if (a.peaks) config.peaks_per_column = *a.peaks;
  if (a.percentile) config.percentile = *a.percentile;
  if (a.null_guard) config.null_guard = *a.null_guard;
  config.output_dir = a.out_dir;
  config.validate();

  const PipelineResult result = run_pipeline(rec, config);
  write_pipeline_outputs(config, result, rec);

  std::printf("frames       %zu detected, %zu retained, %zu discarded, %zu unusable\n",
              result.frames_detected, result.frames_retained, result.frames_discarded,
              result.frames_unusable);
  std::printf("window       %zu samples (p%g of frame durations)\n", result.window_size,
              config.percentile);
  std::printf("k_t          %.6f\n", result.calibration.k_t);
  if (result.measured_event_duration_s > 0.0) {
    std::printf("event leg    %.4f s measured\n", result.measured_event_duration_s);
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < result.global_spectrum.size(); ++i) {
    if (result.global_spectrum[i] > result.global_spectrum[best]) best = i;
  }
  if (!result.global_spectrum.empty()) {
    const double f = result.spectrogram.frequencies_hz[best];
    std::printf("global peak  %+.3f Hz (%+.4f m/s)\n", f,
                doppler_to_velocity(f, rec.center_frequency_hz));
  }
  std::printf("written to   %s\n", config.output_dir.string().c_str());
  return kOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
  std::string spectrogram;
  std::string reference;
  std::optional<double> fc;
  std::string out;
  ReportOptions options;
};

double median_db(const SpectrogramDb& g) {
  std::vector<double> v = g.db;
  if (v.empty()) throw ArtifactError("reference spectrogram is empty");
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

int run_report(ReportArgs a) {
  const SpectrogramDb grid = read_spectrogram_csv(a.spectrogram);
  double fc = 0.0;
  if (a.fc) {
    fc = *a.fc;
  } else {
    // The binary sidecar written next to the CSV records the carrier.
    fs::path sidecar = fs::path(a.spectrogram).replace_extension(".json");
    if (!fs::exists(sidecar)) {
      throw ConfigError("fc", "no --fc given and no sidecar " + sidecar.string());
    }
    fc = read_json_file(sidecar).at("center_frequency_hz").get<double>();
  }
  if (!a.reference.empty()) a.options.floor_db = median_db(read_spectrogram_csv(a.reference));

  const auto rows = summarize_components(grid, fc, a.options);
  std::cout << "strengths in dB relative to the "
            << (a.reference.empty() ? "median spectrogram cell" : "static-scene floor") << '\n';
  std::cout << format_report_table(rows);
  if (!a.out.empty()) write_report_csv(a.out, rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind differential Doppler sensing from two-channel passive captures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DIFFSENSE_TOOL_VERSION);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a scene into a two-channel recording");
  simulate->add_option("--scene", sim.scene_path, "Scene JSON file");
  simulate->add_option("--preset", sim.preset, "Built-in scene name (see --list-presets)");
  simulate->add_option("--out", sim.out_dir, "Output directory");
  simulate->add_option("--seed", sim.seed, "Override the transmitter, distortion and noise seeds");
  simulate->add_option("--dump-scene", sim.dump_scene, "Write the resolved scene JSON here");
  simulate->add_flag("--list-presets", sim.list, "List built-in scenes and exit");

  ProcessArgs proc;
  auto* process = app.add_subcommand("process", "Run the differential Doppler pipeline");
  process->add_option("--input", proc.input, "Recording sidecar (.json) or its directory");
  process->add_option("--scene", proc.scene, "Scene JSON to simulate and process");
  process->add_option("--config", proc.config, "Pipeline config or run manifest");
  process->add_option("--out", proc.out_dir, "Output directory")->required();
  process->add_option("--profile", proc.profile, "auto, plate or human")
      ->check(CLI::IsMember({"auto", "plate", "human"}));
  process->add_option("--calibration", proc.calibration,
                      "auto, none, metadata, kt:<k_t> or event:<leg seconds>");
  process->add_option("--iq", proc.iq, "I/Q imbalance correction: metadata or none");
  process->add_option("--window", proc.window, "hann, gaussian or rect");
  process->add_option("--span", proc.span, "STFT window span (s)");
  process->add_option("--hop", proc.hop, "STFT hop (s)");
  process->add_option("--doppler-max", proc.doppler_max, "Doppler grid limit (Hz)");
  process->add_option("--doppler-step", proc.doppler_step, "Doppler grid step (Hz)");
  process->add_flag("--raw", proc.raw, "Do not normalize columns by the window weight sum");
  process->add_option("--thresholds", proc.thresholds, "adaptive or START,END amplitudes");
  process->add_option("--end-count", proc.end_count, "Sub-threshold run that closes a frame");
  process->add_option("--percentile", proc.percentile, "Percentile of frame durations for the window");
  process->add_option("--null-guard", proc.null_guard, "Relative reference-bin floor");
  process->add_option("--dc-window", proc.dc_window, "DC removal window (samples, 0 = off)");
  process->add_option("--peaks", proc.peaks, "Peaks kept per spectrogram column");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Summarize Doppler components of a spectrogram");
  report->add_option("--spectrogram", rep.spectrogram, "spectrogram.csv")->required();
  report->add_option("--reference", rep.reference, "Static-scene spectrogram.csv for the floor");
  report->add_option("--fc", rep.fc, "Carrier frequency (Hz)");
  report->add_option("--out", rep.out, "Write the table as CSV");
  report->add_option("--peaks", rep.options.peaks_per_column, "Peaks per column");
  report->add_option("--min-above-median", rep.options.min_above_median_db,
                     "Peak threshold above the column median (dB)");
  report->add_option("--min-support", rep.options.min_support_fraction,
                     "Fraction of columns a component must appear in");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*process) return run_process(proc);
    if (*report) return run_report(rep);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: malformed number (" << e.what() << ")\n";
    return kConfig;
  } catch (const RecordingError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const ArtifactError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const EmptyResultError& e) {
    std::cerr << "empty result: " << e.what() << '\n';
    return kEmpty;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
