#include "diffsense/preprocess.hpp"

#include <cmath>

#include "diffsense/errors.hpp"

namespace diffsense {

namespace {

template <typename C>
std::vector<C> remove_dc_impl(std::span<const C> x, std::size_t window) {
  if (window == 0) throw InvalidArgument("DC window length must be at least 1");
  if (window > x.size()) {
    throw InvalidArgument("DC window length exceeds the recording length");
  }
  const std::size_t n = x.size();
  // prefix[k] = sum of x[0..k)
  std::vector<Complex> prefix(n + 1, Complex{});
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = prefix[k] + Complex(x[k]);

  const std::size_t before = (window - 1) / 2;
  const std::size_t after = window - 1 - before;
  std::vector<C> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= before ? k - before : 0;
    const std::size_t hi = std::min(n, k + after + 1);
    const Complex mean = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    out[k] = static_cast<C>(Complex(x[k]) - mean);
  }
  return out;
}

}  // namespace

std::vector<ComplexF> remove_dc_offset(std::span<const ComplexF> x, std::size_t window) {
  return remove_dc_impl(x, window);
}

std::vector<Complex> remove_dc_offset(std::span<const Complex> x, std::size_t window) {
  return remove_dc_impl(x, window);
}

IQRecording remove_dc_offset(const IQRecording& recording, std::size_t window) {
  IQRecording out = recording;
  out.channel1 = remove_dc_offset(std::span<const ComplexF>(recording.channel1), window);
  out.channel2 = remove_dc_offset(std::span<const ComplexF>(recording.channel2), window);
  return out;
}

void ImbalanceParams::validate() const {
  if (!std::isfinite(gain_mismatch) || !(gain_mismatch > 0.0)) {
    throw InvalidArgument("I/Q gain mismatch must be positive");
  }
  if (!std::isfinite(phase_mismatch_rad)) {
    throw InvalidArgument("I/Q phase mismatch must be finite");
  }
  if (std::abs(std::cos(phase_mismatch_rad)) < 1e-12) {
    throw InvalidArgument("I/Q phase mismatch makes the imbalance non-invertible (cos = 0)");
  }
}

bool operator==(const ImbalanceParams& a, const ImbalanceParams& b) {
  return a.gain_mismatch == b.gain_mismatch && a.phase_mismatch_rad == b.phase_mismatch_rad;
}

Complex apply_iq_imbalance(Complex x, const ImbalanceParams& p) {
  const double i = x.real();
  const double q = x.imag();
  return {i, p.gain_mismatch * (q * std::cos(p.phase_mismatch_rad) +
                                i * std::sin(p.phase_mismatch_rad))};
}

Complex correct_iq_imbalance(Complex x, const ImbalanceParams& p) {
  const double i = x.real();
  const double q = x.imag();
  return {i, (q / p.gain_mismatch - i * std::sin(p.phase_mismatch_rad)) /
                 std::cos(p.phase_mismatch_rad)};
}

std::vector<Complex> apply_iq_imbalance(std::span<const Complex> x, const ImbalanceParams& p) {
  p.validate();
  std::vector<Complex> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = apply_iq_imbalance(x[k], p);
  return out;
}

std::vector<Complex> correct_iq_imbalance(std::span<const Complex> x, const ImbalanceParams& p) {
  p.validate();
  std::vector<Complex> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = correct_iq_imbalance(x[k], p);
  return out;
}

std::vector<ComplexF> correct_iq_imbalance(std::span<const ComplexF> x,
                                           const ImbalanceParams& p) {
  p.validate();
  std::vector<ComplexF> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = ComplexF(correct_iq_imbalance(Complex(x[k]), p));
  }
  return out;
}

IQRecording correct_iq_imbalance(const IQRecording& recording, const ImbalanceParams& channel1,
                                 const ImbalanceParams& channel2) {
  IQRecording out = recording;
  out.channel1 = correct_iq_imbalance(std::span<const ComplexF>(recording.channel1), channel1);
  out.channel2 = correct_iq_imbalance(std::span<const ComplexF>(recording.channel2), channel2);
  return out;
}

}  // namespace diffsense
