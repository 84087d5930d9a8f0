#include "diffsense/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "diffsense/errors.hpp"
#include "diffsense/recording.hpp"

namespace diffsense {

namespace fs = std::filesystem;

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open " + path.string());
  return in;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ArtifactError(path.string() + ":" + std::to_string(line) + ": not a number: \"" + s +
                        "\"");
  }
  return v;
}

std::size_t parse_index(const std::string& s, const fs::path& path, std::size_t line) {
  std::size_t v = 0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ArtifactError(path.string() + ":" + std::to_string(line) + ": not an index: \"" + s +
                        "\"");
  }
  return v;
}

// Reads a CSV with the exact expected header; returns the data rows.
std::vector<std::vector<std::string>> read_table(const fs::path& path, const std::string& header,
                                                 std::size_t columns) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ArtifactError(path.string() + ": expected header \"" + header + "\"");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() != columns) {
      throw ArtifactError(path.string() + ":" + std::to_string(n) + ": expected " +
                          std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
  return fs::path(base.string() + suffix);
}

}  // namespace

void write_frame_table_csv(const fs::path& path, const FrameTable& table) {
  auto out = open_out(path);
  out << "start_index,duration\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.starts[i] << ',' << table.durations[i] << '\n';
  }
  finish(out, path);
}

FrameTable read_frame_table_csv(const fs::path& path) {
  FrameTable table;
  std::size_t line = 1;
  for (const auto& row : read_table(path, "start_index,duration", 2)) {
    ++line;
    table.starts.push_back(parse_index(row[0], path, line));
    table.durations.push_back(parse_index(row[1], path, line));
  }
  return table;
}

void write_series_csv(const fs::path& path, const RelativeChannelSeries& series) {
  auto out = open_out(path);
  out << "t_s,real,imag\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_number(series.timestamps_s[i]) << ',' << format_number(series.values[i].real())
        << ',' << format_number(series.values[i].imag()) << '\n';
  }
  finish(out, path);
}

RelativeChannelSeries read_series_csv(const fs::path& path) {
  RelativeChannelSeries series;
  std::size_t line = 1;
  for (const auto& row : read_table(path, "t_s,real,imag", 3)) {
    ++line;
    series.timestamps_s.push_back(parse_double(row[0], path, line));
    series.values.emplace_back(parse_double(row[1], path, line), parse_double(row[2], path, line));
  }
  return series;
}

SpectrogramDb to_db(const DopplerSpectrogram& spectrogram, double floor_db) {
  SpectrogramDb g;
  g.times_s = spectrogram.times_s;
  g.frequencies_hz = spectrogram.frequencies_hz;
  g.db.reserve(spectrogram.values.size());
  for (const Complex& v : spectrogram.values) g.db.push_back(magnitude_db(v, floor_db));
  return g;
}

DopplerSpectrogram from_db(const SpectrogramDb& grid) {
  DopplerSpectrogram s;
  s.times_s = grid.times_s;
  s.frequencies_hz = grid.frequencies_hz;
  s.values.reserve(grid.db.size());
  for (double d : grid.db) s.values.emplace_back(std::pow(10.0, d / 20.0), 0.0);
  s.low_support.assign(grid.rows(), false);
  return s;
}

void write_spectrogram_csv(const fs::path& path, const DopplerSpectrogram& spectrogram,
                           double floor_db) {
  auto out = open_out(path);
  out << "tau_s";
  for (double f : spectrogram.frequencies_hz) out << ',' << format_number(f);
  out << '\n';
  for (std::size_t r = 0; r < spectrogram.rows(); ++r) {
    out << format_number(spectrogram.times_s[r]);
    for (const Complex& v : spectrogram.row(r)) out << ',' << format_number(magnitude_db(v, floor_db));
    out << '\n';
  }
  finish(out, path);
}

SpectrogramDb read_spectrogram_csv(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ArtifactError(path.string() + ": empty file");
  const auto header = split(line);
  if (header.empty() || header[0] != "tau_s") {
    throw ArtifactError(path.string() + ": first header cell must be \"tau_s\"");
  }
  SpectrogramDb g;
  for (std::size_t c = 1; c < header.size(); ++c) {
    g.frequencies_hz.push_back(parse_double(header[c], path, 1));
  }
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ArtifactError(path.string() + ":" + std::to_string(n) + ": expected " +
                          std::to_string(header.size()) + " columns");
    }
    g.times_s.push_back(parse_double(cells[0], path, n));
    for (std::size_t c = 1; c < cells.size(); ++c) g.db.push_back(parse_double(cells[c], path, n));
  }
  return g;
}

void write_spectrogram_binary(const fs::path& base, const DopplerSpectrogram& spectrogram,
                              const nlohmann::json& extra) {
  const fs::path data = with_suffix(base, ".cf32");
  std::vector<ComplexF> samples(spectrogram.values.begin(), spectrogram.values.end());
  write_cf32(data, samples);

  std::vector<bool> low(spectrogram.low_support);
  low.resize(spectrogram.rows(), false);
  nlohmann::json j = {
      {"format", kRecordingFormat},
      {"layout", "row-major, rows = tau, columns = doppler"},
      {"data_file", data.filename().string()},
      {"rows", spectrogram.rows()},
      {"cols", spectrogram.cols()},
      {"tau_s", spectrogram.times_s},
      {"doppler_hz", spectrogram.frequencies_hz},
      {"low_support", low},
  };
  j.update(extra);
  write_json_file(with_suffix(base, ".json"), j);
}

DopplerSpectrogram read_spectrogram_binary(const fs::path& sidecar) {
  const nlohmann::json j = read_json_file(sidecar);
  DopplerSpectrogram s;
  try {
    s.times_s = j.at("tau_s").get<std::vector<double>>();
    s.frequencies_hz = j.at("doppler_hz").get<std::vector<double>>();
    s.low_support = j.at("low_support").get<std::vector<bool>>();
    const auto data = sidecar.parent_path() / j.at("data_file").get<std::string>();
    const auto samples = read_cf32(data);
    if (samples.size() != s.rows() * s.cols() || s.low_support.size() != s.rows()) {
      throw ArtifactError(sidecar.string() + ": data size does not match the grids");
    }
    s.values.assign(samples.begin(), samples.end());
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError(sidecar.string() + ": " + e.what());
  } catch (const RecordingError& e) {
    throw ArtifactError(sidecar.string() + ": " + e.what());
  }
  return s;
}

void write_peaks_csv(const fs::path& path, const std::vector<DopplerPeak>& peaks,
                     double center_frequency_hz) {
  auto out = open_out(path);
  out << "t_s,doppler_hz,magnitude,velocity_mps\n";
  for (const auto& p : peaks) {
    out << format_number(p.time_s) << ',' << format_number(p.frequency_hz) << ','
        << format_number(p.magnitude) << ','
        << format_number(doppler_to_velocity(p.frequency_hz, center_frequency_hz)) << '\n';
  }
  finish(out, path);
}

void write_global_spectrum_csv(const fs::path& path, const std::vector<double>& grid_hz,
                               const std::vector<double>& magnitude) {
  if (grid_hz.size() != magnitude.size()) {
    throw InvalidArgument("global spectrum grid and magnitudes differ in length");
  }
  auto out = open_out(path);
  out << "doppler_hz,magnitude,db\n";
  for (std::size_t i = 0; i < grid_hz.size(); ++i) {
    out << format_number(grid_hz[i]) << ',' << format_number(magnitude[i]) << ','
        << format_number(magnitude_db(magnitude[i])) << '\n';
  }
  finish(out, path);
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArtifactError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace diffsense
