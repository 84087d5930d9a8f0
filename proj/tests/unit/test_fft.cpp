#include <gtest/gtest.h>

#include <random>

#include "diffsense/errors.hpp"
#include "diffsense/fft.hpp"
#include "support/oracles.hpp"

using namespace diffsense;

TEST(Fft, MatchesBruteForceDftAt64) {
  std::mt19937_64 rng(7);
  const auto x = oracle::random_complex(rng, 64);
  const auto got = fft(x);
  const auto want = oracle::brute_dft(x);
  EXPECT_LE(oracle::max_abs_diff(got, want), 1e-9 * oracle::max_abs(want));
}

TEST(Fft, MatchesBruteForceAtAwkwardSizes) {
  std::mt19937_64 rng(8);
  for (std::size_t n : {1, 2, 3, 7, 31, 97, 100, 127, 316}) {
    const auto x = oracle::random_complex(rng, n);
    const auto got = fft(x);
    const auto want = oracle::brute_dft(x);
    EXPECT_LE(oracle::max_abs_diff(got, want), 1e-9 * oracle::max_abs(want)) << "n=" << n;
  }
}

TEST(Fft, InverseWithoutScalingReturnsNTimesInput) {
  std::mt19937_64 rng(9);
  const auto x = oracle::random_complex(rng, 210);
  auto back = ifft_unnormalized(fft(x));
  for (auto& v : back) v /= 210.0;
  EXPECT_LE(oracle::max_abs_diff(back, x), 1e-12);
}

TEST(Fft, PlanRejectsWrongBufferLength) {
  FftPlan plan(16, FftDirection::Forward);
  std::vector<Complex> in(15), out(16);
  EXPECT_THROW(plan.execute(in, out), InvalidArgument);
}

TEST(Fft, PlanIsReusable) {
  std::mt19937_64 rng(10);
  FftPlan plan(48, FftDirection::Forward);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = oracle::random_complex(rng, 48);
    std::vector<Complex> out(48);
    plan.execute(x, out);
    EXPECT_LE(oracle::max_abs_diff(out, oracle::brute_dft(x)), 1e-10);
  }
}

TEST(Fft, NextFastSizeIsSmoothAndMinimal) {
  auto smooth = [](std::size_t n) {
    for (std::size_t p : {2, 3, 5, 7}) {
      while (n % p == 0) n /= p;
    }
    return n == 1;
  };
  for (std::size_t n = 1; n < 3000; ++n) {
    const std::size_t m = next_fast_fft_size(n);
    ASSERT_GE(m, n);
    ASSERT_TRUE(smooth(m)) << n;
    for (std::size_t k = n; k < m; ++k) ASSERT_FALSE(smooth(k)) << n;
  }
}
