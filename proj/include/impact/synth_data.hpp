#pragma once

#include <cstdint>

#include "impact/core_types.hpp"

namespace impact::synth {

/// Generator settings. Pulse amplitudes and shapes come from the signal RNG
/// stream; every noise draw comes from a separate noise stream, so changing a
/// noise parameter never changes the reference traces.
///
/// The noise terms (gain drift, onset-triggered ringing, white noise, baseline
/// drift, trigger delay) are modeling assumptions for mouthguard loosening and
/// sensor noise, not a measured spectral signature.
struct SynthConfig {
  std::size_t n_impacts = 163;
  std::size_t trace_len = 200;  ///< samples at 1 kHz
  int min_pulses = 1;
  int max_pulses = 3;
  double lin_acc_min_g = 10.0;
  double lin_acc_max_g = 100.0;
  double ang_vel_min_rads = 5.0;
  double ang_vel_max_rads = 40.0;
  double pulse_min_ms = 8.0;
  double pulse_max_ms = 40.0;

  double gain_drift_max = 0.15;        ///< peak fractional over-reading
  double ringing_freq_min_hz = 150.0;
  double ringing_freq_max_hz = 400.0;
  double ringing_amp_max = 0.3;        ///< fraction of the channel peak
  double ringing_decay_min_ms = 5.0;
  double ringing_decay_max_ms = 20.0;
  double white_noise_frac = 0.6;       ///< sigma as a fraction of the channel std
  int time_shift_max = 5;              ///< samples of trigger delay
  double baseline_drift_frac = 0.05;   ///< end-of-trace offset as a fraction of the channel peak

  std::uint64_t seed = 2022;

  void validate() const;
};

/// Paired reference/noisy impacts, partitioned 70/15/15 under cfg.seed.
ImpactDataset generate(const SynthConfig& cfg);

}  // namespace impact::synth
