#include "diffsense/fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "diffsense/errors.hpp"

namespace diffsense {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FftPlan::Impl {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

FftPlan::FftPlan(std::size_t size, FftDirection direction)
    : size_(size), direction_(direction), impl_(std::make_unique<Impl>()) {
  if (size == 0) throw InvalidArgument("FFT size must be positive");
  std::lock_guard lock(planner_mutex());
  impl_->in = fftw_alloc_complex(size);
  impl_->out = fftw_alloc_complex(size);
  if (!impl_->in || !impl_->out) throw Error("FFTW allocation failed");
  const int sign = direction == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
  impl_->plan = fftw_plan_dft_1d(static_cast<int>(size), impl_->in, impl_->out, sign,
                                 FFTW_ESTIMATE);
  if (!impl_->plan) throw Error("FFTW planning failed");
}

FftPlan::~FftPlan() = default;
FftPlan::FftPlan(FftPlan&&) noexcept = default;
FftPlan& FftPlan::operator=(FftPlan&&) noexcept = default;

void FftPlan::execute(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != size_ || out.size() != size_) {
    throw InvalidArgument("FFT buffer length does not match plan size");
  }
  // std::complex<double> and fftw_complex share layout.
  std::memcpy(impl_->in, in.data(), size_ * sizeof(Complex));
  fftw_execute(impl_->plan);
  std::memcpy(static_cast<void*>(out.data()), impl_->out, size_ * sizeof(Complex));
}

std::vector<Complex> fft(std::span<const Complex> x) {
  std::vector<Complex> out(x.size());
  if (x.empty()) return out;
  FftPlan(x.size(), FftDirection::Forward).execute(x, out);
  return out;
}

std::vector<Complex> ifft_unnormalized(std::span<const Complex> x) {
  std::vector<Complex> out(x.size());
  if (x.empty()) return out;
  FftPlan(x.size(), FftDirection::Inverse).execute(x, out);
  return out;
}

std::size_t next_fast_fft_size(std::size_t n) {
  if (n <= 1) return 1;
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace diffsense
