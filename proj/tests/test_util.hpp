#pragma once

#include <cmath>
#include <filesystem>
#include <string>

#include "impact/core_types.hpp"
#include "impact/rng.hpp"

namespace impact::testing {

inline Series random_series(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Series s(n);
  for (double& v : s) v = rng.uniform(lo, hi);
  return s;
}

inline KinematicsTrace constant_trace(std::size_t n, std::array<double, 6> values) {
  KinematicsTrace::Channels ch;
  for (std::size_t c = 0; c < 6; ++c) ch[c].assign(n, values[c]);
  return KinematicsTrace(std::move(ch));
}

inline KinematicsTrace random_trace(Rng& rng, std::size_t n, double amp = 10.0) {
  KinematicsTrace::Channels ch;
  for (auto& c : ch) c = random_series(rng, n, -amp, amp);
  return KinematicsTrace(std::move(ch));
}

/// Raised-cosine pulse of unit height centred at `center` with the given width.
inline Series raised_cosine(std::size_t n, double center, double width) {
  Series s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) - center) / width;
    if (std::abs(x) < 0.5) s[i] = 0.5 * (1.0 + std::cos(2.0 * M_PI * x));
  }
  return s;
}

inline double rel_err(double a, double b) {
  const double d = std::abs(a - b);
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? d : d / m;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("impact_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace impact::testing
