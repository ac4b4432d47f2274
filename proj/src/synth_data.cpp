#include "impact/synth_data.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "impact/rng.hpp"

namespace impact::synth {

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

constexpr std::array<const char*, 5> kLocations = {"facemask", "front", "oblique", "side", "back"};
constexpr std::array<double, 4> kSpeeds = {3.6, 5.5, 7.4, 9.3};
constexpr const char* kSourceNote =
    "synthetic; the mouthguard ringing noise model is an assumption, not a measured signature";

// Uniform random rotation from a uniform unit quaternion (Shoemake).
Mat3 random_rotation(Rng& rng) {
  const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double two_pi = 2.0 * std::numbers::pi;
  const double w = a * std::sin(two_pi * u2), x = a * std::cos(two_pi * u2);
  const double y = b * std::sin(two_pi * u3), z = b * std::cos(two_pi * u3);
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
           {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
           {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
}

Vec3 apply(const Mat3& r, const Vec3& v) {
  return {r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
          r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
          r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2]};
}

Vec3 normalized(Vec3 v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (double& x : v) x /= n;
  return v;
}

// Raised-cosine pulse of unit height over [onset, onset + duration), in samples.
double raised_cosine(double t, double onset, double duration) {
  if (t < onset || t >= onset + duration) return 0.0;
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * (t - onset) / duration));
}

struct Pulse {
  double onset = 0;     // samples
  double duration = 0;  // samples
  double lin_amp = 0;   // g
  double ang_amp = 0;   // rad/s
  Vec3 lin_dir{};
  Vec3 ang_dir{};
};

double peak_abs(const Series& s) {
  double m = 0;
  for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

double stddev(const Series& s) {
  double mean = 0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double ss = 0;
  for (double v : s) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(s.size()));
}

}  // namespace

void SynthConfig::validate() const {
  const auto range_ok = [](double lo, double hi) { return lo >= 0.0 && hi >= lo; };
  if (n_impacts < 3) throw std::invalid_argument("synth: need at least 3 impacts");
  if (trace_len < 100) throw std::invalid_argument("synth: trace_len must be at least 100");
  if (min_pulses < 1 || max_pulses < min_pulses) throw std::invalid_argument("synth: bad pulse count range");
  if (!range_ok(lin_acc_min_g, lin_acc_max_g) || !range_ok(ang_vel_min_rads, ang_vel_max_rads) ||
      !range_ok(pulse_min_ms, pulse_max_ms) || pulse_min_ms <= 0.0 ||
      !range_ok(ringing_freq_min_hz, ringing_freq_max_hz) ||
      !range_ok(ringing_decay_min_ms, ringing_decay_max_ms) || ringing_decay_min_ms <= 0.0) {
    throw std::invalid_argument("synth: ranges must be non-negative with min <= max");
  }
  if (gain_drift_max < 0 || ringing_amp_max < 0 || white_noise_frac < 0 || time_shift_max < 0 ||
      baseline_drift_frac < 0) {
    throw std::invalid_argument("synth: noise parameters must be non-negative");
  }
  if (2 * static_cast<std::size_t>(time_shift_max) >= trace_len) {
    throw std::invalid_argument("synth: time shift too large for the trace length");
  }
}

ImpactDataset generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng signal(splitmix64(cfg.seed));
  Rng noise(splitmix64(cfg.seed ^ 0x6E6F697365ULL));
  const std::size_t len = cfg.trace_len;
  const double fs = kCanonicalSampleRateHz;
  const double ms = fs / 1000.0;  // samples per millisecond

  std::vector<ImpactRecord> records;
  records.reserve(cfg.n_impacts);
  for (std::size_t idx = 0; idx < cfg.n_impacts; ++idx) {
    // Reference: one to three raised-cosine pulses along a random head frame.
    const auto location = kLocations[signal.below(kLocations.size())];
    const double speed = kSpeeds[signal.below(kSpeeds.size())];
    const double severity = 0.3 * signal.uniform() + 0.7 * (speed - kSpeeds.front()) /
                                                         (kSpeeds.back() - kSpeeds.front());
    const Mat3 frame = random_rotation(signal);
    const int n_pulses = static_cast<int>(signal.integer(cfg.min_pulses, cfg.max_pulses));

    std::vector<Pulse> pulses;
    double onset = signal.uniform(15.0, 40.0) * ms;
    for (int p = 0; p < n_pulses; ++p) {
      Pulse pulse;
      pulse.onset = onset;
      pulse.duration = signal.uniform(cfg.pulse_min_ms, cfg.pulse_max_ms) * ms;
      const double scale = p == 0 ? severity : severity * signal.uniform(0.2, 0.6);
      pulse.lin_amp = cfg.lin_acc_min_g + (cfg.lin_acc_max_g - cfg.lin_acc_min_g) * scale;
      pulse.ang_amp = cfg.ang_vel_min_rads + (cfg.ang_vel_max_rads - cfg.ang_vel_min_rads) * scale;
      // Impact direction near the frame x axis, rotation about an axis near z.
      const Vec3 lin_local = normalized({1.0, signal.uniform(-0.3, 0.3), signal.uniform(-0.3, 0.3)});
      const Vec3 ang_local = normalized({signal.uniform(-0.3, 0.3), signal.uniform(-0.3, 0.3), 1.0});
      pulse.lin_dir = apply(frame, lin_local);
      pulse.ang_dir = apply(frame, ang_local);
      pulses.push_back(pulse);
      onset += signal.uniform(0.4, 1.0) * pulse.duration + signal.uniform(2.0, 15.0) * ms;
    }

    KinematicsTrace::Channels ref;
    for (auto& ch : ref) ch.assign(len, 0.0);
    for (const auto& p : pulses) {
      for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i);
        const double lin = raised_cosine(t, p.onset, p.duration);
        // Angular velocity builds and decays over a longer interval than the acceleration pulse.
        const double ang = raised_cosine(t, p.onset, 2.0 * p.duration);
        for (std::size_t a = 0; a < 3; ++a) {
          if (lin != 0.0) ref[a][i] += p.lin_amp * lin * p.lin_dir[a];
          if (ang != 0.0) ref[a + 3][i] += p.ang_amp * ang * p.ang_dir[a];
        }
      }
    }

    // Noise parameters, all from the noise stream.
    const double gain = noise.uniform(0.0, cfg.gain_drift_max);
    const double gain_freq = noise.uniform(2.0, 8.0);
    const double gain_phase = noise.uniform(0.0, 2.0 * std::numbers::pi);
    const double ring_freq = noise.uniform(cfg.ringing_freq_min_hz, cfg.ringing_freq_max_hz);
    const double ring_amp = noise.uniform(0.0, cfg.ringing_amp_max);
    const double ring_decay = noise.uniform(cfg.ringing_decay_min_ms, cfg.ringing_decay_max_ms) * ms;
    const auto shift = static_cast<std::size_t>(noise.integer(0, cfg.time_shift_max));
    std::array<double, kNumTrainable> ring_phase{}, baseline{};
    for (int c = 0; c < kNumTrainable; ++c) {
      ring_phase[static_cast<std::size_t>(c)] = noise.uniform(0.0, 2.0 * std::numbers::pi);
      baseline[static_cast<std::size_t>(c)] = noise.uniform(-1.0, 1.0);
    }

    KinematicsTrace::Channels noisy = ref;
    const double ring_start = pulses.front().onset;
    for (std::size_t c = 0; c < kNumTrainable; ++c) {
      const Series& r = ref[c];
      Series& n = noisy[c];
      const double peak = peak_abs(r);
      const double sigma = cfg.white_noise_frac * stddev(r);
      for (std::size_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i);
        if (gain > 0.0) {
          n[i] += gain * (0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * gain_freq * t / fs + gain_phase)) * r[i];
        }
        if (ring_amp > 0.0 && t >= ring_start) {
          const double dt = t - ring_start;
          n[i] += ring_amp * peak * std::exp(-dt / ring_decay) *
                  std::sin(2.0 * std::numbers::pi * ring_freq * dt / fs + ring_phase[c]);
        }
        if (sigma > 0.0) n[i] += sigma * noise.normal();
        if (cfg.baseline_drift_frac > 0.0) {
          n[i] += cfg.baseline_drift_frac * peak * baseline[c] * t / static_cast<double>(len - 1);
        }
      }
      if (shift > 0) {
        // Mouthguard triggers late: its samples lag the reference.
        for (std::size_t i = len; i-- > 0;) n[i] = i >= shift ? n[i - shift] : 0.0;
      }
    }

    ImpactRecord rec{fmt::format("impact_{:04d}", idx),
                     KinematicsTrace(std::move(noisy)),
                     KinematicsTrace(std::move(ref)),
                     {{"location", location},
                      {"impact_speed_mps", fmt::format("{}", speed)},
                      {"source", kSourceNote}}};
    records.push_back(std::move(rec));
  }
  return partition(std::move(records), cfg.seed);
}

}  // namespace impact::synth
