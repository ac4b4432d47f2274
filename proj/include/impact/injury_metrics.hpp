#pragma once

#include <array>

#include "impact/core_types.hpp"

namespace impact::bic {

/// Head mass and principal moments of inertia used by head impact power.
struct HeadInertia {
  double mass_kg = 4.50;
  double ixx = 0.016;  // kg m^2
  double iyy = 0.024;
  double izz = 0.022;
};

struct InjuryMetrics {
  double hic15 = 0;
  double hip_w = 0;
  double gambit = 0;
  double si = 0;
  double bric = 0;
  double cp = 0;
};

inline constexpr double kHicWindowS = 0.015;
inline constexpr double kGambitLinearCritical = 250.0;       // g
inline constexpr double kGambitAngularCritical = 25000.0;    // rad/s^2
inline constexpr double kSeverityThresholdG = 4.0;
inline constexpr std::array<double, 3> kBricCritical = {66.2, 59.1, 44.2};  // rad/s
inline constexpr std::array<double, 4> kCpCoefficients = {-10.2, 0.0433, 0.000873, -0.00000092};

/// HIC15 of a linear-acceleration magnitude series in g. Windows span whole
/// samples, up to 15 ms; integrals are trapezoidal. O(n * w) via a prefix sum.
double hic15(const Series& lin_acc_mag_g, double sample_rate_hz = kCanonicalSampleRateHz);

/// Peak head impact power in watts. Linear terms use a in m/s^2 and its
/// running integral; rotational terms use alpha = d(omega)/dt and the
/// measured omega.
double hip(const std::array<Series, 3>& lin_acc_g, const std::array<Series, 3>& ang_vel_rads,
           const HeadInertia& inertia = {}, double sample_rate_hz = kCanonicalSampleRateHz);

/// max over t of sqrt((|a|/250)^2 + (|alpha|/25000)^2).
double gambit(const Series& lin_acc_mag_g, const Series& ang_acc_mag_rads2);

/// Gadd severity index over the supra-4 g interval around the global peak.
double severity_index(const Series& lin_acc_mag_g, double sample_rate_hz = kCanonicalSampleRateHz);

/// Brain injury criterion from the per-axis peak |omega|.
double bric(const std::array<Series, 3>& ang_vel_rads);

/// Logistic combined probability of concussion from the peak |a| (g) and
/// peak |alpha| (rad/s^2).
double combined_probability(double peak_lin_acc_g, double peak_ang_acc_rads2);
double combined_probability(const Series& lin_acc_mag_g, const Series& ang_acc_mag_rads2);

/// Pointwise magnitude of the angular acceleration obtained by differentiating
/// each angular-velocity channel.
Series angular_acceleration_magnitude(const KinematicsTrace& trace);

InjuryMetrics compute_all(const KinematicsTrace& trace, const HeadInertia& inertia = {});

}  // namespace impact::bic
