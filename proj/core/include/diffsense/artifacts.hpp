#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diffsense/differential.hpp"
#include "diffsense/doppler.hpp"
#include "diffsense/segmentation.hpp"

namespace diffsense {

/// Shortest decimal form that reads back to the same double.
std::string format_number(double value);

/// "start_index,duration" per frame.
void write_frame_table_csv(const std::filesystem::path& path, const FrameTable& table);
FrameTable read_frame_table_csv(const std::filesystem::path& path);

/// "t_s,real,imag" per sample.
void write_series_csv(const std::filesystem::path& path, const RelativeChannelSeries& series);
RelativeChannelSeries read_series_csv(const std::filesystem::path& path);

/// Magnitude grid in dB as read back from a spectrogram CSV.
struct SpectrogramDb {
  std::vector<double> times_s;
  std::vector<double> frequencies_hz;
  std::vector<double> db;  // row-major, times x frequencies

  std::size_t rows() const noexcept { return times_s.size(); }
  std::size_t cols() const noexcept { return frequencies_hz.size(); }
  double at(std::size_t r, std::size_t c) const { return db[r * cols() + c]; }
};

SpectrogramDb to_db(const DopplerSpectrogram& spectrogram, double floor_db = kDbFloor);

/// Real-valued spectrogram whose magnitudes equal 10^(dB/20).
DopplerSpectrogram from_db(const SpectrogramDb& grid);

/// CSV matrix: first row "tau_s" then the Doppler grid; every further row is
/// an analysis time followed by 20 log10 |S| per Doppler bin.
void write_spectrogram_csv(const std::filesystem::path& path,
                           const DopplerSpectrogram& spectrogram, double floor_db = kDbFloor);

/// Throws ArtifactError on a malformed file.
SpectrogramDb read_spectrogram_csv(const std::filesystem::path& path);

/// Raw complex dump: <base>.cf32 (row-major float32 pairs) plus <base>.json
/// describing the grids. `extra` is merged into the JSON sidecar.
void write_spectrogram_binary(const std::filesystem::path& base,
                              const DopplerSpectrogram& spectrogram,
                              const nlohmann::json& extra = nlohmann::json::object());

DopplerSpectrogram read_spectrogram_binary(const std::filesystem::path& sidecar);

/// "t_s,doppler_hz,magnitude,velocity_mps".
void write_peaks_csv(const std::filesystem::path& path, const std::vector<DopplerPeak>& peaks,
                     double center_frequency_hz);

/// "doppler_hz,magnitude,db".
void write_global_spectrum_csv(const std::filesystem::path& path,
                               const std::vector<double>& grid_hz,
                               const std::vector<double>& magnitude);

nlohmann::json read_json_file(const std::filesystem::path& path);

/// Pretty-printed, newline-terminated.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace diffsense
