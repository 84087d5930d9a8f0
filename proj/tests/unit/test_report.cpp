#include <gtest/gtest.h>

#include <fstream>

#include "diffsense/errors.hpp"
#include "diffsense/report.hpp"
#include "support/tempdir.hpp"

using namespace diffsense;

namespace {

constexpr double kFc = 25.1e9;

// -400..400 Hz in 1 Hz steps, background at -60 dB.
SpectrogramDb flat_grid(std::size_t rows) {
  SpectrogramDb g;
  for (std::size_t r = 0; r < rows; ++r) g.times_s.push_back(0.02 * static_cast<double>(r));
  for (int f = -400; f <= 400; ++f) g.frequencies_hz.push_back(f);
  g.db.assign(rows * g.frequencies_hz.size(), -60.0);
  return g;
}

void put(SpectrogramDb& g, std::size_t row, double f, double db) {
  g.db[row * g.cols() + static_cast<std::size_t>(f + 400)] = db;
}

}  // namespace

TEST(Report, TwoWalkersGiveTwoBidirectionalRows) {
  SpectrogramDb g = flat_grid(100);
  for (std::size_t r = 0; r < 100; ++r) {
    const double sign = (r / 25) % 2 == 0 ? 1.0 : -1.0;
    put(g, r, sign * (200.0 + static_cast<double>(r % 3)), -20.0);
    put(g, r, -sign * 50.0, -30.0);
  }
  const auto rows = summarize_components(g, kFc);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].sign, "+/-");
  EXPECT_NEAR(rows[0].doppler_hz, 201.0, 1.0);
  EXPECT_NEAR(rows[0].velocity_mps, 1.2, 0.01);
  EXPECT_EQ(rows[0].columns, 100u);
  EXPECT_DOUBLE_EQ(rows[0].strength_low_db, 40.0);
  EXPECT_EQ(rows[1].sign, "+/-");
  EXPECT_DOUBLE_EQ(rows[1].doppler_hz, 50.0);
  EXPECT_NEAR(rows[1].velocity_mps, 0.2985980657371, 1e-12);
  EXPECT_DOUBLE_EQ(rows[1].strength_high_db, 30.0);
}

TEST(Report, OneSidedComponentKeepsItsSign) {
  SpectrogramDb g = flat_grid(40);
  for (std::size_t r = 0; r < 40; ++r) put(g, r, -350.0, -10.0);
  put(g, 0, 350.0, -10.0);  // a single stray hit on the other side
  const auto rows = summarize_components(g, kFc);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].sign, "-");
  EXPECT_NEAR(rows[0].velocity_mps, 2.0901864601594, 1e-12);
}

TEST(Report, SparseAndStaticHitsAreIgnored) {
  SpectrogramDb g = flat_grid(100);
  for (std::size_t r = 0; r < 100; ++r) put(g, r, 0.0, 0.0);  // zero Doppler
  for (std::size_t r = 0; r < 3; ++r) put(g, r, 120.0, -10.0);  // 3 < 5% of 100
  EXPECT_TRUE(summarize_components(g, kFc).empty());
}

TEST(Report, EmptyGridGivesEmptyTable) {
  const SpectrogramDb g;
  const auto rows = summarize_components(g, kFc);
  EXPECT_TRUE(rows.empty());
  EXPECT_NE(format_report_table(rows).find("(no Doppler components found)"), std::string::npos);
  SpectrogramDb bad = flat_grid(2);
  bad.db.pop_back();
  EXPECT_THROW(summarize_components(bad, kFc), ArtifactError);
}

TEST(Report, ExplicitFloorShiftsStrengths) {
  SpectrogramDb g = flat_grid(20);
  for (std::size_t r = 0; r < 20; ++r) put(g, r, 100.0, -20.0);
  ReportOptions o;
  o.floor_db = -80.0;
  const auto rows = summarize_components(g, kFc, o);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].strength_low_db, 60.0);
  EXPECT_EQ(rows[0].sign, "+");
}

TEST(Report, CsvHasOneLinePerRow) {
  testing_support::TempDir dir;
  ComponentRow r;
  r.sign = "+/-";
  r.doppler_hz = 5.25;
  r.velocity_mps = 0.0314;
  r.columns = 7;
  write_report_csv(dir / "report.csv", {r, r});
  std::ifstream in(dir / "report.csv");
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 3);
}
