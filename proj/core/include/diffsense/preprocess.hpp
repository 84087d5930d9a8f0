#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "diffsense/common.hpp"
#include "diffsense/recording.hpp"

namespace diffsense {

inline constexpr std::size_t kDefaultDcWindow = std::size_t{1} << 16;

/// Subtracts a centered running mean of `window` samples. Near the edges
/// the window shrinks to the samples that exist.
std::vector<ComplexF> remove_dc_offset(std::span<const ComplexF> x, std::size_t window);
std::vector<Complex> remove_dc_offset(std::span<const Complex> x, std::size_t window);

/// Both channels independently.
IQRecording remove_dc_offset(const IQRecording& recording, std::size_t window);

/// Receiver I/Q imbalance. The model keeps I and distorts Q:
///   I' = I,  Q' = g (Q cos d + I sin d).
struct ImbalanceParams {
  double gain_mismatch = 1.0;
  double phase_mismatch_rad = 0.0;

  /// Rejects g <= 0, non-finite values and cos(d) == 0.
  void validate() const;
};

bool operator==(const ImbalanceParams& a, const ImbalanceParams& b);

Complex apply_iq_imbalance(Complex x, const ImbalanceParams& p);
Complex correct_iq_imbalance(Complex x, const ImbalanceParams& p);

std::vector<Complex> apply_iq_imbalance(std::span<const Complex> x, const ImbalanceParams& p);
std::vector<Complex> correct_iq_imbalance(std::span<const Complex> x, const ImbalanceParams& p);
std::vector<ComplexF> correct_iq_imbalance(std::span<const ComplexF> x, const ImbalanceParams& p);

IQRecording correct_iq_imbalance(const IQRecording& recording, const ImbalanceParams& channel1,
                                 const ImbalanceParams& channel2);

}  // namespace diffsense
