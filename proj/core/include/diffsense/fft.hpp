#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "diffsense/common.hpp"

namespace diffsense {

enum class FftDirection { Forward, Inverse };

// Unnormalized complex DFT of a fixed length, backed by FFTW.
// Plan creation is serialized internally; execute() may be called
// concurrently on distinct plans.
class FftPlan {
 public:
  FftPlan(std::size_t size, FftDirection direction);
  ~FftPlan();
  FftPlan(FftPlan&&) noexcept;
  FftPlan& operator=(FftPlan&&) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const noexcept { return size_; }
  FftDirection direction() const noexcept { return direction_; }

  void execute(std::span<const Complex> in, std::span<Complex> out) const;

 private:
  struct Impl;
  std::size_t size_ = 0;
  FftDirection direction_ = FftDirection::Forward;
  std::unique_ptr<Impl> impl_;
};

/// Forward DFT, X[k] = sum_n x[n] e^{-j 2 pi k n / N}.
std::vector<Complex> fft(std::span<const Complex> x);

/// Inverse DFT without the 1/N factor.
std::vector<Complex> ifft_unnormalized(std::span<const Complex> x);

/// Smallest size >= n whose prime factors are all in {2, 3, 5, 7}.
std::size_t next_fast_fft_size(std::size_t n);

}  // namespace diffsense
