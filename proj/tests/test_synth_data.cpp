#include <gtest/gtest.h>

#include <cmath>

#include "impact/eval_stats.hpp"
#include "impact/synth_data.hpp"

using namespace impact;
using namespace impact::synth;

namespace {

SynthConfig small(std::uint64_t seed = 11) {
  SynthConfig cfg;
  cfg.n_impacts = 20;
  cfg.seed = seed;
  return cfg;
}

SynthConfig silent(SynthConfig cfg) {
  cfg.gain_drift_max = 0;
  cfg.ringing_amp_max = 0;
  cfg.white_noise_frac = 0;
  cfg.time_shift_max = 0;
  cfg.baseline_drift_frac = 0;
  return cfg;
}

double mean_raw_snr(const ImpactDataset& ds) {
  double sum = 0;
  int n = 0;
  for (const auto& r : ds.records()) {
    for (ComponentId c : kTrainableComponents) {
      sum += stats::snr_db(r.reference->channel(c), r.noisy.channel(c));
      ++n;
    }
  }
  return sum / n;
}

}  // namespace

TEST(Synth, ZeroNoiseIsExactCopy) {
  const auto ds = generate(silent(small()));
  for (const auto& r : ds.records()) {
    ASSERT_TRUE(r.reference.has_value());
    EXPECT_EQ(r.noisy, *r.reference);
  }
}

TEST(Synth, Deterministic) {
  const auto a = generate(small(4)), b = generate(small(4));
  ASSERT_EQ(a.records().size(), b.records().size());
  for (std::size_t i = 0; i < a.records().size(); ++i) {
    EXPECT_EQ(a.records()[i].noisy, b.records()[i].noisy);
    EXPECT_EQ(a.records()[i].reference, b.records()[i].reference);
  }
  EXPECT_EQ(a.split(), b.split());
  EXPECT_NE(generate(small(5)).records()[0].reference, a.records()[0].reference);
}

TEST(Synth, NoiseSettingsLeaveReferenceUntouched) {
  auto loud = small();
  loud.white_noise_frac = 0.9;
  loud.ringing_amp_max = 0.1;
  loud.time_shift_max = 2;
  const auto a = generate(small()), b = generate(loud);
  for (std::size_t i = 0; i < a.records().size(); ++i) {
    EXPECT_EQ(a.records()[i].reference, b.records()[i].reference);
    EXPECT_NE(a.records()[i].noisy, b.records()[i].noisy);
  }
}

TEST(Synth, DefaultShapeAndMetadata) {
  const auto ds = generate(SynthConfig{});
  ASSERT_EQ(ds.records().size(), 163u);
  EXPECT_EQ(ds.count(Split::Train), 113u);
  EXPECT_EQ(ds.count(Split::Val), 25u);
  EXPECT_EQ(ds.count(Split::Test), 25u);
  EXPECT_EQ(ds.records()[0].impact_id, "impact_0000");
  for (const auto& r : ds.records()) {
    EXPECT_EQ(r.noisy.size(), 200u);
    EXPECT_EQ(r.noisy.sample_rate_hz(), 1000.0);
    EXPECT_EQ(r.metadata.count("location"), 1u);
    EXPECT_EQ(r.metadata.count("impact_speed_mps"), 1u);
    EXPECT_NE(r.metadata.at("source").find("assumption"), std::string::npos);
  }
}

TEST(Synth, DefaultRawSnrInTargetBand) {
  const double snr = mean_raw_snr(generate(SynthConfig{}));
  EXPECT_GE(snr, 3.0);
  EXPECT_LE(snr, 9.0);
}

TEST(Synth, NoiseOverReadsPeaks) {
  // Gain drift and ringing push the mouthguard peak above the reference.
  auto cfg = silent(small());
  cfg.gain_drift_max = 0.15;
  cfg.ringing_amp_max = 0.3;
  const auto ds = generate(cfg);
  double over = 0;
  int n = 0;
  for (const auto& r : ds.records()) {
    for (ComponentId c : kTrainableComponents) {
      over += stats::peak_abs(r.noisy.channel(c)) - stats::peak_abs(r.reference->channel(c));
      ++n;
    }
  }
  EXPECT_GT(over / n, 0.0);
}

TEST(Synth, TimeShiftDelaysNoisy) {
  auto cfg = silent(small());
  cfg.time_shift_max = 3;
  const auto ds = generate(cfg);
  int shifted = 0;
  for (const auto& r : ds.records()) {
    const auto& n = r.noisy.channel(ComponentId::LinAccX);
    const auto& ref = r.reference->channel(ComponentId::LinAccX);
    int found = -1;
    for (int s = 0; s <= 3 && found < 0; ++s) {
      bool match = true;
      for (std::size_t i = std::size_t(s); i < n.size() && match; ++i) match = n[i] == ref[i - std::size_t(s)];
      if (match) found = s;
    }
    EXPECT_GE(found, 0);
    shifted += found > 0;
  }
  EXPECT_GT(shifted, 0);
}

TEST(Synth, Validation) {
  auto bad = small();
  bad.n_impacts = 2;
  EXPECT_THROW(generate(bad), std::invalid_argument);
  bad = small();
  bad.trace_len = 50;
  EXPECT_THROW(generate(bad), std::invalid_argument);
  bad = small();
  bad.min_pulses = 3;
  bad.max_pulses = 2;
  EXPECT_THROW(generate(bad), std::invalid_argument);
  bad = small();
  bad.white_noise_frac = -0.1;
  EXPECT_THROW(generate(bad), std::invalid_argument);
  bad = small();
  bad.lin_acc_min_g = 200;
  EXPECT_THROW(generate(bad), std::invalid_argument);
}
