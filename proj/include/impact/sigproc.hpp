#pragma once

#include <complex>
#include <string>
#include <vector>

#include "impact/core_types.hpp"

namespace impact::sigproc {

/// One biquad in direct form II transposed, a0 normalized to 1.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;
};

/// Digital Butterworth low-pass as a cascade of second-order sections. Each
/// section has unit DC gain, so the overall gain factor is 1.
struct ButterworthFilter {
  int order = 0;
  double cutoff_hz = 0;
  double sample_rate_hz = 0;
  std::vector<Biquad> sections;
  double gain = 1.0;

  std::complex<double> response(double freq_hz) const;
  /// Digital poles of the cascade (conjugate pairs appear once per section).
  std::vector<std::complex<double>> poles() const;
};

/// Analog prototype + frequency pre-warping + bilinear transform.
/// Requires 1 <= order <= 12 and 0 < cutoff_hz < sample_rate_hz / 2.
ButterworthFilter design_butterworth(int order, double cutoff_hz, double sample_rate_hz);

/// Edge padding length used by filtfilt: 3 * (2 * order + 1).
std::size_t filtfilt_padding(const ButterworthFilter& filter);

/// Single causal pass; the section states start at the steady state for a
/// constant input equal to series[0].
Series lfilter(const ButterworthFilter& filter, const Series& series);

/// Zero-phase forward-backward filtering with odd-reflection padding.
/// Requires series.size() > filtfilt_padding(filter).
Series filtfilt(const ButterworthFilter& filter, const Series& series);

KinematicsTrace filtfilt(const ButterworthFilter& filter, const KinematicsTrace& trace);

struct Alignment {
  KinematicsTrace noisy;      ///< shifted so that noisy[i] <- original[i + shift]
  KinematicsTrace reference;
  int shift = 0;
  double correlation = 0;     ///< normalized cross-correlation at the chosen shift
  bool degenerate = false;    ///< a magnitude trace was all zero; shift forced to 0
};

/// Integer shift in [-max_shift, max_shift] maximizing the normalized
/// cross-correlation of the linear-acceleration magnitudes. The shifted noisy
/// trace is zero-filled where it runs out of samples, so both outputs keep the
/// common length.
Alignment align_by_xcorr(const KinematicsTrace& noisy, const KinematicsTrace& reference,
                         int max_shift_samples);

/// Shifts every channel so out[i] = in[i + shift], zero-filling.
KinematicsTrace shift_trace(const KinematicsTrace& trace, int shift);

/// Central differences inside, second-order one-sided differences at both ends.
Series differentiate(const Series& series, double sample_rate_hz);

/// Trapezoidal running integral starting at 0.
Series cumulative_integral(const Series& series, double sample_rate_hz);

inline constexpr std::size_t kWindow = 100;
inline constexpr std::size_t kStride = 5;
inline constexpr std::size_t kPeakAnchor = 20;

/// max(1, floor((length - window) / stride)); the upper offset is exclusive.
std::size_t window_count(std::size_t length, std::size_t window = kWindow,
                         std::size_t stride = kStride);

struct WindowedExample {
  ComponentId component;
  Series input;   ///< noisy window
  Series target;  ///< reference window
  std::string source_id;
  std::size_t offset_samples = 0;
};

/// Sliding-window augmentation of one aligned pair: window_count() windows at
/// offsets k * stride, one example per trainable component per window.
std::vector<WindowedExample> augment(const std::string& source_id, const KinematicsTrace& noisy,
                                     const KinematicsTrace& reference,
                                     std::size_t window = kWindow, std::size_t stride = kStride);

/// Offset of the evaluation window that puts the linear-acceleration magnitude
/// peak at `anchor`, clamped to the trace.
std::size_t evaluation_offset(const KinematicsTrace& trace, std::size_t window = kWindow,
                              std::size_t anchor = kPeakAnchor);

}  // namespace impact::sigproc
