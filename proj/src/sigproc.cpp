#include "impact/sigproc.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace impact::sigproc {

using cdouble = std::complex<double>;

std::complex<double> ButterworthFilter::response(double freq_hz) const {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  const cdouble z1 = std::polar(1.0, -w);
  const cdouble z2 = z1 * z1;
  cdouble h = gain;
  for (const auto& s : sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

std::vector<std::complex<double>> ButterworthFilter::poles() const {
  std::vector<cdouble> out;
  for (const auto& s : sections) {
    if (s.a2 == 0.0) {
      out.emplace_back(-s.a1, 0.0);
      continue;
    }
    // z^2 + a1 z + a2 = 0
    const cdouble disc = std::sqrt(cdouble(s.a1 * s.a1 - 4.0 * s.a2, 0.0));
    out.push_back((-s.a1 + disc) / 2.0);
    out.push_back((-s.a1 - disc) / 2.0);
  }
  return out;
}

ButterworthFilter design_butterworth(int order, double cutoff_hz, double sample_rate_hz) {
  if (order < 1 || order > 12) {
    throw std::invalid_argument(fmt::format("Butterworth order {} outside [1, 12]", order));
  }
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample rate must be positive");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    throw std::invalid_argument(
        fmt::format("cutoff {} Hz must lie in (0, Nyquist = {} Hz)", cutoff_hz, sample_rate_hz / 2));
  }

  ButterworthFilter f;
  f.order = order;
  f.cutoff_hz = cutoff_hz;
  f.sample_rate_hz = sample_rate_hz;

  const double two_fs = 2.0 * sample_rate_hz;
  const double warped = two_fs * std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
  const auto bilinear = [two_fs](cdouble p) { return (two_fs + p) / (two_fs - p); };

  for (int k = 0; k < order / 2; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    const cdouble z = bilinear(warped * std::polar(1.0, theta));
    Biquad s;
    s.a1 = -2.0 * z.real();
    s.a2 = std::norm(z);
    const double g = (1.0 + s.a1 + s.a2) / 4.0;
    s.b0 = g;
    s.b1 = 2.0 * g;
    s.b2 = g;
    f.sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double zr = bilinear(cdouble(-warped, 0.0)).real();
    Biquad s;
    s.a1 = -zr;
    const double g = (1.0 - zr) / 2.0;
    s.b0 = g;
    s.b1 = g;
    f.sections.push_back(s);
  }
  return f;
}

std::size_t filtfilt_padding(const ButterworthFilter& filter) {
  return 3 * (2 * static_cast<std::size_t>(filter.order) + 1);
}

namespace {

void run_sections(const ButterworthFilter& filter, Series& x) {
  if (x.empty()) return;
  for (const auto& s : filter.sections) {
    // Steady state of a unit-DC-gain section driven by a constant x[0].
    const double x0 = x[0];
    double z1 = (s.b1 + s.b2 - s.a1 - s.a2) * x0;
    double z2 = (s.b2 - s.a2) * x0;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  if (filter.gain != 1.0) {
    for (double& v : x) v *= filter.gain;
  }
}

}  // namespace

Series lfilter(const ButterworthFilter& filter, const Series& series) {
  Series out = series;
  run_sections(filter, out);
  return out;
}

Series filtfilt(const ButterworthFilter& filter, const Series& series) {
  const std::size_t pad = filtfilt_padding(filter);
  const std::size_t n = series.size();
  if (n <= pad) {
    throw std::invalid_argument(
        fmt::format("filtfilt needs more than {} samples, got {}", pad, n));
  }

  Series ext(n + 2 * pad);
  const double first = series.front();
  const double last = series.back();
  for (std::size_t i = 0; i < pad; ++i) {
    ext[i] = 2.0 * first - series[pad - i];
    ext[pad + n + i] = 2.0 * last - series[n - 2 - i];
  }
  std::copy(series.begin(), series.end(), ext.begin() + static_cast<std::ptrdiff_t>(pad));

  run_sections(filter, ext);
  std::reverse(ext.begin(), ext.end());
  run_sections(filter, ext);
  std::reverse(ext.begin(), ext.end());

  const auto start = ext.begin() + static_cast<std::ptrdiff_t>(pad);
  return Series(start, start + static_cast<std::ptrdiff_t>(n));
}

KinematicsTrace filtfilt(const ButterworthFilter& filter, const KinematicsTrace& trace) {
  KinematicsTrace::Channels out;
  for (int c = 0; c < kNumTrainable; ++c) {
    out[static_cast<std::size_t>(c)] = filtfilt(filter, trace.channel(c));
  }
  return KinematicsTrace(std::move(out), trace.sample_rate_hz(), trace.t0_s());
}

KinematicsTrace shift_trace(const KinematicsTrace& trace, int shift) {
  const auto n = static_cast<long long>(trace.size());
  KinematicsTrace::Channels out;
  for (int c = 0; c < kNumTrainable; ++c) {
    const auto& in = trace.channel(c);
    auto& dst = out[static_cast<std::size_t>(c)];
    dst.assign(in.size(), 0.0);
    for (long long i = 0; i < n; ++i) {
      const long long j = i + shift;
      if (j >= 0 && j < n) dst[static_cast<std::size_t>(i)] = in[static_cast<std::size_t>(j)];
    }
  }
  return KinematicsTrace(std::move(out), trace.sample_rate_hz(), trace.t0_s());
}

Alignment align_by_xcorr(const KinematicsTrace& noisy, const KinematicsTrace& reference,
                         int max_shift_samples) {
  if (noisy.sample_rate_hz() != reference.sample_rate_hz()) {
    throw std::invalid_argument("alignment needs equal sample rates");
  }
  const std::size_t len = std::min(noisy.size(), reference.size());
  if (max_shift_samples < 0 || 2 * static_cast<std::size_t>(max_shift_samples) >= len) {
    throw std::invalid_argument(
        fmt::format("max shift {} must be below half the trace length {}", max_shift_samples, len));
  }

  const KinematicsTrace n_common = noisy.size() == len ? noisy : noisy.slice(0, len);
  const KinematicsTrace r_common = reference.size() == len ? reference : reference.slice(0, len);
  const Series mn = magnitude_trace(n_common, VectorKind::LinAcc);
  const Series mr = magnitude_trace(r_common, VectorKind::LinAcc);

  double en = 0, er = 0;
  for (std::size_t i = 0; i < len; ++i) {
    en += mn[i] * mn[i];
    er += mr[i] * mr[i];
  }
  if (en == 0.0 || er == 0.0) {
    return Alignment{n_common, r_common, 0, 0.0, true};
  }
  const double norm = std::sqrt(en) * std::sqrt(er);

  const auto corr_at = [&](int s) {
    double acc = 0;
    const auto n = static_cast<long long>(len);
    const long long lo = std::max<long long>(0, -s);
    const long long hi = std::min<long long>(n, n - s);
    for (long long i = lo; i < hi; ++i) {
      acc += mn[static_cast<std::size_t>(i + s)] * mr[static_cast<std::size_t>(i)];
    }
    return acc / norm;
  };

  // Scan 0, -1, +1, -2, +2, ... so ties resolve to the smallest |shift|.
  int best_shift = 0;
  double best = corr_at(0);
  for (int m = 1; m <= max_shift_samples; ++m) {
    for (int s : {-m, m}) {
      const double c = corr_at(s);
      if (c > best) {
        best = c;
        best_shift = s;
      }
    }
  }
  return Alignment{shift_trace(n_common, best_shift), r_common, best_shift, best, false};
}

Series differentiate(const Series& s, double sample_rate_hz) {
  const std::size_t n = s.size();
  if (n < 3) throw std::invalid_argument("differentiate needs at least 3 samples");
  const double half_fs = 0.5 * sample_rate_hz;
  Series d(n);
  d[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) * half_fs;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (s[i + 1] - s[i - 1]) * half_fs;
  d[n - 1] = (3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) * half_fs;
  return d;
}

Series cumulative_integral(const Series& s, double sample_rate_hz) {
  if (s.size() < 2) throw std::invalid_argument("cumulative_integral needs at least 2 samples");
  const double half_dt = 0.5 / sample_rate_hz;
  Series out(s.size());
  out[0] = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) out[i] = out[i - 1] + (s[i - 1] + s[i]) * half_dt;
  return out;
}

std::size_t window_count(std::size_t length, std::size_t window, std::size_t stride) {
  if (window == 0 || stride == 0) throw std::invalid_argument("window and stride must be positive");
  if (length < window) {
    throw std::invalid_argument(
        fmt::format("trace of {} samples is shorter than the {}-sample window", length, window));
  }
  return std::max<std::size_t>(1, (length - window) / stride);
}

std::vector<WindowedExample> augment(const std::string& source_id, const KinematicsTrace& noisy,
                                     const KinematicsTrace& reference, std::size_t window,
                                     std::size_t stride) {
  if (noisy.size() != reference.size()) {
    throw std::invalid_argument("augment needs aligned traces of equal length");
  }
  const std::size_t count = window_count(noisy.size(), window, stride);
  std::vector<WindowedExample> out;
  out.reserve(count * kNumTrainable);
  for (std::size_t k = 0; k < count; ++k) {
    const auto off = static_cast<std::ptrdiff_t>(k * stride);
    const auto len = static_cast<std::ptrdiff_t>(window);
    for (ComponentId c : kTrainableComponents) {
      const auto& n = noisy.channel(c);
      const auto& r = reference.channel(c);
      out.push_back(WindowedExample{c, Series(n.begin() + off, n.begin() + off + len),
                                    Series(r.begin() + off, r.begin() + off + len), source_id,
                                    k * stride});
    }
  }
  return out;
}

std::size_t evaluation_offset(const KinematicsTrace& trace, std::size_t window,
                              std::size_t anchor) {
  if (trace.size() < window) {
    throw std::invalid_argument(
        fmt::format("trace of {} samples is shorter than the {}-sample window", trace.size(), window));
  }
  const Series mag = magnitude_trace(trace, VectorKind::LinAcc);
  const auto peak = static_cast<std::size_t>(std::max_element(mag.begin(), mag.end()) - mag.begin());
  const std::size_t start = peak > anchor ? peak - anchor : 0;
  return std::min(start, trace.size() - window);
}

}  // namespace impact::sigproc
