#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diffsense/artifacts.hpp"

namespace diffsense {

struct ReportOptions {
  std::size_t peaks_per_column = 2;
  double min_above_median_db = 15.0;
  double min_support_fraction = 0.05;  // of all columns
  /// Peaks closer than this in |f_d| share a component. Zero selects
  /// max(3 grid steps, 10% of |f_d|).
  double cluster_tolerance_hz = 0.0;
  /// Reference level for strengths; defaults to the median cell.
  std::optional<double> floor_db;
};

/// One row of the Doppler-signature summary.
struct ComponentRow {
  std::string sign;  // "+", "-" or "+/-"
  double doppler_hz = 0.0;   // key |f_d|
  double velocity_mps = 0.0;  // of |f_d|
  double strength_low_db = 0.0;   // 10th percentile of peak level, relative
  double strength_high_db = 0.0;  // 90th percentile
  std::size_t columns = 0;
};

std::vector<ComponentRow> summarize_components(const SpectrogramDb& grid,
                                               double center_frequency_hz,
                                               const ReportOptions& options = {});

std::string format_report_table(const std::vector<ComponentRow>& rows);
void write_report_csv(const std::filesystem::path& path, const std::vector<ComponentRow>& rows);

}  // namespace diffsense
