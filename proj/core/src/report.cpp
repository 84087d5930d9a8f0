#include "diffsense/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "diffsense/errors.hpp"

namespace diffsense {

namespace {

struct Hit {
  double f = 0.0;
  double db = 0.0;
  std::size_t column = 0;
};

double median_of(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

// Nearest-rank percentile of a non-empty sample.
double percentile_of(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size()) / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  return v[rank - 1];
}

std::vector<Hit> column_peaks(const SpectrogramDb& grid, const ReportOptions& opt) {
  std::vector<Hit> hits;
  const std::size_t n = grid.cols();
  std::vector<double> col(n);
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) col[c] = grid.at(r, c);
    const double floor = median_of(col) + opt.min_above_median_db;
    std::vector<std::size_t> maxima;
    for (std::size_t c = 0; c < n; ++c) {
      const bool left = c == 0 || col[c] > col[c - 1];
      const bool right = c + 1 == n || col[c] >= col[c + 1];
      if (left && right && col[c] >= floor) maxima.push_back(c);
    }
    std::stable_sort(maxima.begin(), maxima.end(),
                     [&](std::size_t a, std::size_t b) { return col[a] > col[b]; });
    if (maxima.size() > opt.peaks_per_column) maxima.resize(opt.peaks_per_column);
    for (std::size_t c : maxima) hits.push_back({grid.frequencies_hz[c], col[c], r});
  }
  return hits;
}

}  // namespace

std::vector<ComponentRow> summarize_components(const SpectrogramDb& grid,
                                               double center_frequency_hz,
                                               const ReportOptions& opt) {
  if (grid.db.size() != grid.rows() * grid.cols()) {
    throw ArtifactError("spectrogram grid size does not match its axes");
  }
  if (opt.peaks_per_column == 0) throw InvalidArgument("peaks_per_column must be at least 1");
  std::vector<ComponentRow> rows;
  if (grid.rows() == 0 || grid.cols() == 0) return rows;

  const double step = grid.cols() > 1 ? std::abs(grid.frequencies_hz[1] - grid.frequencies_hz[0])
                                      : 1.0;
  const double floor_db = opt.floor_db ? *opt.floor_db : median_of(grid.db);

  std::vector<Hit> hits = column_peaks(grid, opt);
  // Peaks on the zero-Doppler bins are residual static clutter.
  std::erase_if(hits, [&](const Hit& h) { return std::abs(h.f) < 1.5 * step; });
  std::stable_sort(hits.begin(), hits.end(),
                   [](const Hit& a, const Hit& b) { return std::abs(a.f) < std::abs(b.f); });

  auto tolerance = [&](double f) {
    return opt.cluster_tolerance_hz > 0.0 ? opt.cluster_tolerance_hz
                                          : std::max(3.0 * step, 0.1 * std::abs(f));
  };

  const auto min_columns = static_cast<std::size_t>(
      std::ceil(opt.min_support_fraction * static_cast<double>(grid.rows())));
  std::size_t i = 0;
  while (i < hits.size()) {
    // Grow the cluster while the next |f| stays near the running mean.
    std::size_t j = i + 1;
    double sum = std::abs(hits[i].f);
    while (j < hits.size()) {
      const double center = sum / static_cast<double>(j - i);
      if (std::abs(hits[j].f) - center > tolerance(center)) break;
      sum += std::abs(hits[j].f);
      ++j;
    }
    std::set<std::size_t> columns;
    std::vector<double> freqs, levels;
    std::size_t positive = 0;
    for (std::size_t k = i; k < j; ++k) {
      columns.insert(hits[k].column);
      freqs.push_back(std::abs(hits[k].f));
      levels.push_back(hits[k].db - floor_db);
      if (hits[k].f > 0.0) ++positive;
    }
    i = j;
    if (columns.size() < std::max<std::size_t>(1, min_columns)) continue;

    ComponentRow row;
    const std::size_t total = freqs.size();
    const std::size_t negative = total - positive;
    if (positive * 5 >= total && negative * 5 >= total) {
      row.sign = "+/-";
    } else {
      row.sign = positive >= negative ? "+" : "-";
    }
    row.doppler_hz = median_of(freqs);
    row.velocity_mps = doppler_to_velocity(row.doppler_hz, center_frequency_hz);
    row.strength_low_db = percentile_of(levels, 10.0);
    row.strength_high_db = percentile_of(levels, 90.0);
    row.columns = columns.size();
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ComponentRow& a, const ComponentRow& b) {
    return a.doppler_hz > b.doppler_hz;
  });
  return rows;
}

std::string format_report_table(const std::vector<ComponentRow>& rows) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-4s %14s %16s %26s %8s\n", "sign", "doppler_hz",
                "velocity_mps", "rel_strength_db (p10..p90)", "columns");
  out += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-4s %14.3f %16.4f %12.1f .. %-10.1f %8zu\n", r.sign.c_str(),
                  r.doppler_hz, r.velocity_mps, r.strength_low_db, r.strength_high_db, r.columns);
    out += line;
  }
  if (rows.empty()) out += "(no Doppler components found)\n";
  return out;
}

void write_report_csv(const std::filesystem::path& path, const std::vector<ComponentRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "sign,doppler_hz,velocity_mps,strength_low_db,strength_high_db,columns\n";
  for (const auto& r : rows) {
    out << r.sign << ',' << format_number(r.doppler_hz) << ',' << format_number(r.velocity_mps)
        << ',' << format_number(r.strength_low_db) << ',' << format_number(r.strength_high_db)
        << ',' << r.columns << '\n';
  }
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace diffsense
