#include "impact/injury_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "impact/sigproc.hpp"

namespace impact::bic {

namespace {

double max_abs(const Series& s) {
  double m = 0;
  for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

void require_equal_length(const Series& a, const Series& b, const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

double hic15(const Series& a, double sample_rate_hz) {
  if (a.empty()) throw std::invalid_argument("hic15: empty series");
  const double dt = 1.0 / sample_rate_hz;
  const auto max_span = static_cast<std::size_t>(std::floor(kHicWindowS * sample_rate_hz + 1e-9));

  // prefix[i] = trapezoidal integral of |a| from sample 0 to sample i
  std::vector<double> prefix(a.size(), 0.0);
  for (std::size_t i = 1; i < a.size(); ++i) {
    prefix[i] = prefix[i - 1] + 0.5 * (std::abs(a[i - 1]) + std::abs(a[i])) * dt;
  }

  double best = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t last = std::min(a.size() - 1, i + max_span);
    for (std::size_t j = i + 1; j <= last; ++j) {
      const double duration = static_cast<double>(j - i) * dt;
      const double mean = (prefix[j] - prefix[i]) / duration;
      best = std::max(best, duration * std::pow(mean, 2.5));
    }
  }
  return best;
}

double hip(const std::array<Series, 3>& lin_acc_g, const std::array<Series, 3>& ang_vel_rads,
           const HeadInertia& inertia, double sample_rate_hz) {
  const std::size_t n = lin_acc_g[0].size();
  for (int i = 0; i < 3; ++i) {
    if (lin_acc_g[i].size() != n || ang_vel_rads[i].size() != n) {
      throw std::invalid_argument("hip: channel lengths differ");
    }
  }
  if (n < 3) throw std::invalid_argument("hip: needs at least 3 samples");

  const std::array<double, 3> moments = {inertia.ixx, inertia.iyy, inertia.izz};
  Series power(n, 0.0);
  for (int i = 0; i < 3; ++i) {
    Series a = lin_acc_g[i];
    for (double& v : a) v *= kStandardGravity;
    const Series v = sigproc::cumulative_integral(a, sample_rate_hz);
    const Series alpha = sigproc::differentiate(ang_vel_rads[i], sample_rate_hz);
    const Series& omega = ang_vel_rads[i];
    for (std::size_t t = 0; t < n; ++t) {
      power[t] += inertia.mass_kg * a[t] * v[t] + moments[i] * alpha[t] * omega[t];
    }
  }
  return *std::max_element(power.begin(), power.end());
}

double gambit(const Series& a, const Series& alpha) {
  require_equal_length(a, alpha, "gambit");
  double best = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double x = a[t] / kGambitLinearCritical;
    const double y = alpha[t] / kGambitAngularCritical;
    best = std::max(best, std::sqrt(x * x + y * y));
  }
  return best;
}

double severity_index(const Series& a, double sample_rate_hz) {
  if (a.empty()) throw std::invalid_argument("severity_index: empty series");
  const auto start_it = std::find_if(a.begin(), a.end(),
                                     [](double v) { return std::abs(v) > kSeverityThresholdG; });
  if (start_it == a.end()) return 0.0;
  const auto start = static_cast<std::size_t>(start_it - a.begin());

  std::size_t peak = 0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (std::abs(a[i]) > std::abs(a[peak])) peak = i;
  }
  std::size_t end = a.size() - 1;
  for (std::size_t i = peak + 1; i < a.size(); ++i) {
    if (std::abs(a[i]) <= kSeverityThresholdG) {
      end = i;
      break;
    }
  }

  const double half_dt = 0.5 / sample_rate_hz;
  double total = 0;
  for (std::size_t i = start; i < end; ++i) {
    total += (std::pow(std::abs(a[i]), 2.5) + std::pow(std::abs(a[i + 1]), 2.5)) * half_dt;
  }
  return total;
}

double bric(const std::array<Series, 3>& w) {
  double sum = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double r = max_abs(w[i]) / kBricCritical[i];
    sum += r * r;
  }
  return std::sqrt(sum);
}

double combined_probability(double a, double alpha) {
  const auto& b = kCpCoefficients;
  const double z = b[0] + b[1] * a + b[2] * alpha + b[3] * a * alpha;
  return 1.0 / (1.0 + std::exp(-z));
}

double combined_probability(const Series& a, const Series& alpha) {
  require_equal_length(a, alpha, "combined_probability");
  return combined_probability(max_abs(a), max_abs(alpha));
}

Series angular_acceleration_magnitude(const KinematicsTrace& trace) {
  const double fs = trace.sample_rate_hz();
  const Series ax = sigproc::differentiate(trace.channel(ComponentId::AngVelX), fs);
  const Series ay = sigproc::differentiate(trace.channel(ComponentId::AngVelY), fs);
  const Series az = sigproc::differentiate(trace.channel(ComponentId::AngVelZ), fs);
  Series out(ax.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::sqrt(ax[i] * ax[i] + ay[i] * ay[i] + az[i] * az[i]);
  }
  return out;
}

InjuryMetrics compute_all(const KinematicsTrace& trace, const HeadInertia& inertia) {
  const double fs = trace.sample_rate_hz();
  const Series a_mag = magnitude_trace(trace, VectorKind::LinAcc);
  const Series alpha_mag = angular_acceleration_magnitude(trace);
  const std::array<Series, 3> lin = {trace.channel(0), trace.channel(1), trace.channel(2)};
  const std::array<Series, 3> ang = {trace.channel(3), trace.channel(4), trace.channel(5)};

  InjuryMetrics m;
  m.hic15 = hic15(a_mag, fs);
  m.hip_w = hip(lin, ang, inertia, fs);
  m.gambit = gambit(a_mag, alpha_mag);
  m.si = severity_index(a_mag, fs);
  m.bric = bric(ang);
  m.cp = combined_probability(a_mag, alpha_mag);
  return m;
}

}  // namespace impact::bic
