#include "diffsense/recording.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>

#include "diffsense/errors.hpp"

namespace diffsense {

namespace fs = std::filesystem;

void IQRecording::validate() const {
  if (channel1.size() != channel2.size()) {
    throw InvalidArgument("recording channels differ in length");
  }
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) {
    throw InvalidArgument("recording sample rate must be positive");
  }
  auto finite = [](ComplexF v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); };
  for (std::size_t i = 0; i < channel1.size(); ++i) {
    if (!finite(channel1[i]) || !finite(channel2[i])) {
      throw InvalidArgument("recording contains a non-finite sample at index " +
                            std::to_string(i));
    }
  }
}

bool operator==(const IQRecording& a, const IQRecording& b) {
  auto same_bits = [](const std::vector<ComplexF>& x, const std::vector<ComplexF>& y) {
    return x.size() == y.size() &&
           (x.empty() || std::memcmp(x.data(), y.data(), x.size() * sizeof(ComplexF)) == 0);
  };
  return a.sample_rate_hz == b.sample_rate_hz &&
         a.center_frequency_hz == b.center_frequency_hz && a.metadata == b.metadata &&
         same_bits(a.channel1, b.channel1) && same_bits(a.channel2, b.channel2);
}

fs::path recording_sidecar_path(const fs::path& path) {
  if (fs::is_directory(path)) return path / "recording.json";
  return path;
}

namespace {

std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
  }
  return v;
}

}  // namespace

void write_cf32(const fs::path& path, const std::vector<ComplexF>& samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RecordingError(RecordingError::Kind::Io, "cannot open " + path.string());
  std::vector<std::uint32_t> words(samples.size() * 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    words[2 * i] = to_little_endian(std::bit_cast<std::uint32_t>(samples[i].real()));
    words[2 * i + 1] = to_little_endian(std::bit_cast<std::uint32_t>(samples[i].imag()));
  }
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out) throw RecordingError(RecordingError::Kind::Io, "write failed: " + path.string());
}

std::vector<ComplexF> read_cf32(const fs::path& path) {
  std::error_code ec;
  const auto bytes = fs::file_size(path, ec);
  if (ec) throw RecordingError(RecordingError::Kind::Io, "cannot stat " + path.string());
  if (bytes % (2 * sizeof(float)) != 0) {
    throw RecordingError(RecordingError::Kind::TruncatedData,
                         path.string() + " is not a whole number of cf32 samples");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RecordingError(RecordingError::Kind::Io, "cannot open " + path.string());
  std::vector<std::uint32_t> words(bytes / sizeof(std::uint32_t));
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<std::uintmax_t>(in.gcount()) != bytes) {
    throw RecordingError(RecordingError::Kind::TruncatedData, "short read on " + path.string());
  }
  std::vector<ComplexF> samples(words.size() / 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i] = {std::bit_cast<float>(to_little_endian(words[2 * i])),
                  std::bit_cast<float>(to_little_endian(words[2 * i + 1]))};
  }
  return samples;
}

void write_recording(const IQRecording& recording, const fs::path& path) {
  recording.validate();
  fs::path sidecar = path;
  if (fs::is_directory(path)) sidecar = path / "recording.json";
  if (sidecar.has_parent_path()) fs::create_directories(sidecar.parent_path());

  const std::string stem = sidecar.stem().string();
  const std::string ch1 = stem + ".ch1.cf32";
  const std::string ch2 = stem + ".ch2.cf32";
  write_cf32(sidecar.parent_path() / ch1, recording.channel1);
  write_cf32(sidecar.parent_path() / ch2, recording.channel2);

  nlohmann::json header = {
      {"format", kRecordingFormat},
      {"sample_rate_hz", recording.sample_rate_hz},
      {"center_freq_hz", recording.center_frequency_hz},
      {"sample_count", recording.size()},
      {"channel_files", {ch1, ch2}},
      {"metadata", recording.metadata},
  };
  std::ofstream out(sidecar, std::ios::trunc);
  if (!out) throw RecordingError(RecordingError::Kind::Io, "cannot open " + sidecar.string());
  out << header.dump(2) << '\n';
  if (!out) throw RecordingError(RecordingError::Kind::Io, "write failed: " + sidecar.string());
}

IQRecording read_recording(const fs::path& path) {
  using Kind = RecordingError::Kind;
  const fs::path sidecar = recording_sidecar_path(path);
  if (!fs::exists(sidecar)) {
    throw RecordingError(Kind::MetadataMissing, "metadata missing: " + sidecar.string());
  }
  std::ifstream in(sidecar);
  if (!in) throw RecordingError(Kind::Io, "cannot open " + sidecar.string());

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw RecordingError(Kind::MalformedHeader,
                         "malformed header " + sidecar.string() + ": " + e.what());
  }

  IQRecording rec;
  std::vector<std::string> files;
  std::optional<std::size_t> declared_count;
  try {
    if (!header.is_object()) throw RecordingError(Kind::MalformedHeader, "header is not an object");
    if (header.value("format", std::string(kRecordingFormat)) != kRecordingFormat) {
      throw RecordingError(Kind::MalformedHeader,
                           "unsupported sample format " + header.at("format").dump());
    }
    rec.sample_rate_hz = header.at("sample_rate_hz").get<double>();
    rec.center_frequency_hz = header.at("center_freq_hz").get<double>();
    files = header.at("channel_files").get<std::vector<std::string>>();
    if (header.contains("metadata")) rec.metadata = header.at("metadata");
    if (header.contains("sample_count")) declared_count = header.at("sample_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw RecordingError(Kind::MalformedHeader,
                         "malformed header " + sidecar.string() + ": " + e.what());
  }
  if (files.size() != 2) {
    throw RecordingError(Kind::MalformedHeader, "expected two channel files");
  }
  if (!(rec.sample_rate_hz > 0.0)) {
    throw RecordingError(Kind::MalformedHeader, "sample_rate_hz must be positive");
  }
  if (!rec.metadata.is_object()) {
    throw RecordingError(Kind::MalformedHeader, "metadata must be an object");
  }

  const fs::path dir = sidecar.parent_path();
  for (const auto& f : files) {
    if (!fs::exists(dir / f)) {
      throw RecordingError(Kind::Io, "channel file missing: " + (dir / f).string());
    }
  }
  rec.channel1 = read_cf32(dir / files[0]);
  rec.channel2 = read_cf32(dir / files[1]);
  if (rec.channel1.size() != rec.channel2.size()) {
    throw RecordingError(Kind::LengthMismatch,
                         "channel length mismatch: " + std::to_string(rec.channel1.size()) +
                             " vs " + std::to_string(rec.channel2.size()));
  }
  if (declared_count && *declared_count != rec.channel1.size()) {
    throw RecordingError(Kind::TruncatedData,
                         "sample_count " + std::to_string(*declared_count) + " but files hold " +
                             std::to_string(rec.channel1.size()));
  }
  return rec;
}

}  // namespace diffsense
