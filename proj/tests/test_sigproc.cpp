#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "impact/sigproc.hpp"
#include "test_util.hpp"

using namespace impact;
using namespace impact::sigproc;
using impact::testing::raised_cosine;

namespace {

// Squared magnitude of a bilinear-transformed Butterworth low-pass, in closed form.
double analytic_gain_sq(int order, double f, double fc, double fs) {
  const double r = std::tan(M_PI * f / fs) / std::tan(M_PI * fc / fs);
  return 1.0 / (1.0 + std::pow(r, 2 * order));
}

double db(double mag) { return 20.0 * std::log10(mag); }

std::size_t argmax_abs(const Series& s) {
  return static_cast<std::size_t>(
      std::max_element(s.begin(), s.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
      s.begin());
}

double rms(const Series& s) {
  double acc = 0;
  for (double v : s) acc += v * v;
  return std::sqrt(acc / static_cast<double>(s.size()));
}

// Direct-form difference equation of the expanded transfer function, zero
// initial state.
Series direct_form(const ButterworthFilter& f, const Series& x) {
  std::vector<double> b{1.0}, a{1.0};
  const auto mul = [](const std::vector<double>& p, const std::vector<double>& q) {
    std::vector<double> r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
  };
  for (const auto& s : f.sections) {
    b = mul(b, {s.b0, s.b1, s.b2});
    a = mul(a, {1.0, s.a1, s.a2});
  }
  Series y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0;
    for (std::size_t k = 0; k < b.size() && k <= n; ++k) acc += f.gain * b[k] * x[n - k];
    for (std::size_t k = 1; k < a.size() && k <= n; ++k) acc -= a[k] * y[n - k];
    y[n] = acc;
  }
  return y;
}

KinematicsTrace pulse_trace(std::size_t n, double center, double width) {
  KinematicsTrace::Channels ch;
  const Series p = raised_cosine(n, center, width);
  const std::array<double, 6> gains{30, -12, 5, 8, 2, -4};
  for (std::size_t c = 0; c < 6; ++c) {
    ch[c] = p;
    for (double& v : ch[c]) v *= gains[c];
  }
  return KinematicsTrace(std::move(ch));
}

}  // namespace

TEST(Butterworth, MatchesClosedFormMagnitude) {
  for (int order : {1, 2, 5, 8, 9}) {
    for (double fc : {20.0, 80.0, 160.0, 400.0}) {
      const auto f = design_butterworth(order, fc, 1000.0);
      for (double freq : {0.0, 5.0, 50.0, fc, 0.9 * fc, 1.3 * fc, 450.0}) {
        const double got = std::norm(f.response(freq));
        EXPECT_NEAR(got, analytic_gain_sq(order, freq, fc, 1000.0), 1e-10) << order << " " << fc << " " << freq;
      }
    }
  }
}

TEST(Butterworth, CutoffIsHalfPower) {
  const auto f = design_butterworth(5, 160.0, 1000.0);
  EXPECT_NEAR(db(std::abs(f.response(160.0))), -3.0103, 0.1);
  EXPECT_NEAR(std::abs(f.response(0.0)), 1.0, 1e-9);
  EXPECT_EQ(f.sections.size(), 3u);
}

TEST(Butterworth, RollOffIsTwentyDbPerDecadePerOrder) {
  const auto f = design_butterworth(5, 20.0, 1000.0);
  const double slope = (db(std::abs(f.response(80.0))) - db(std::abs(f.response(40.0)))) / std::log10(2.0);
  EXPECT_NEAR(slope, -100.0, 5.0);
}

TEST(Butterworth, PolesInsideUnitCircle) {
  for (int order = 1; order <= 12; ++order) {
    const auto f = design_butterworth(order, 160.0, 1000.0);
    EXPECT_EQ(static_cast<int>(f.sections.size()), (order + 1) / 2);
    for (const auto& p : f.poles()) EXPECT_LT(std::abs(p), 1.0);
  }
}

TEST(Butterworth, RejectsBadDesigns) {
  EXPECT_THROW(design_butterworth(0, 100, 1000), std::invalid_argument);
  EXPECT_THROW(design_butterworth(13, 100, 1000), std::invalid_argument);
  EXPECT_THROW(design_butterworth(5, 500, 1000), std::invalid_argument);
  EXPECT_THROW(design_butterworth(5, 0, 1000), std::invalid_argument);
}

TEST(Lfilter, MatchesExpandedDifferenceEquation) {
  Rng rng(8);
  Series x = impact::testing::random_series(rng, 300);
  x[0] = 0.0;  // steady-state start for a zero first sample is the zero state
  for (int order : {3, 6}) {
    const auto f = design_butterworth(order, 120.0, 1000.0);
    const Series a = lfilter(f, x), b = direct_form(f, x);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
  }
}

TEST(Filtfilt, ConstantPassesUnchanged) {
  const auto f = design_butterworth(5, 160.0, 1000.0);
  const Series y = filtfilt(f, Series(200, 3.25));
  for (double v : y) EXPECT_NEAR(v, 3.25, 1e-10);
}

TEST(Filtfilt, SymmetricPulseKeepsItsPeak) {
  for (int order : {5, 7, 9}) {
    for (double width : {8.0, 20.0, 40.0}) {
      const auto f = design_butterworth(order, 60.0, 1000.0);
      const Series x = raised_cosine(200, 90.0, width);
      EXPECT_EQ(argmax_abs(filtfilt(f, x)), 90u) << order << " " << width;
    }
  }
}

TEST(Filtfilt, StopBandSinusoidIsRemoved) {
  const auto f = design_butterworth(5, 160.0, 1000.0);
  Series x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2.0 * M_PI * 400.0 * double(i) / 1000.0);
  // Odd padding pins the end samples to the input, so only the interior is
  // expected to be clean.
  const Series y = filtfilt(f, x);
  EXPECT_LT(rms(Series(y.begin() + 50, y.end() - 50)), 1e-6 * rms(x));
  EXPECT_NEAR(y.back(), x.back(), 1e-6);
}

TEST(Filtfilt, TimeReversalSymmetry) {
  // Forward-backward filtering commutes with time reversal up to edge effects;
  // the padded edges differ by the mismatch of the two initial transients.
  Rng rng(4);
  const auto f = design_butterworth(5, 100.0, 1000.0);
  Series x = impact::testing::random_series(rng, 400);
  Series xr(x.rbegin(), x.rend());
  const Series a = filtfilt(f, x);
  Series b = filtfilt(f, xr);
  std::reverse(b.begin(), b.end());
  double worst_interior = 0, worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    worst = std::max(worst, d);
    if (i >= 100 && i + 100 < a.size()) worst_interior = std::max(worst_interior, d);
  }
  EXPECT_LT(worst_interior, 1e-9);
  EXPECT_LT(worst, 0.05);
}

TEST(Filtfilt, RequiresMoreSamplesThanPadding) {
  const auto f = design_butterworth(5, 160.0, 1000.0);
  EXPECT_EQ(filtfilt_padding(f), 33u);
  EXPECT_THROW(filtfilt(f, Series(33, 1.0)), std::invalid_argument);
  EXPECT_NO_THROW(filtfilt(f, Series(34, 1.0)));
}

TEST(Align, IdenticalTracesNeedNoShift) {
  const auto t = pulse_trace(200, 60, 20);
  const auto a = align_by_xcorr(t, t, 10);
  EXPECT_EQ(a.shift, 0);
  EXPECT_FALSE(a.degenerate);
  EXPECT_NEAR(a.correlation, 1.0, 1e-12);
  EXPECT_EQ(a.noisy, t);
}

TEST(Align, DelayedReferenceGivesNegativeShift) {
  const auto noisy = pulse_trace(200, 60, 20);
  const auto ref = pulse_trace(200, 67, 20);
  EXPECT_EQ(align_by_xcorr(noisy, ref, 10).shift, -7);
}

TEST(Align, DelayedNoisyIsAdvanced) {
  const auto ref = pulse_trace(200, 60, 20);
  const auto noisy = pulse_trace(200, 67, 20);
  const auto a = align_by_xcorr(noisy, ref, 10);
  EXPECT_EQ(a.shift, 7);
  for (std::size_t i = 0; i < 190; ++i) {
    EXPECT_NEAR(a.noisy.channel(0)[i], ref.channel(0)[i], 1e-9);
  }
  EXPECT_EQ(a.noisy.size(), 200u);
  EXPECT_EQ(a.noisy.channel(0)[199], 0.0);
}

TEST(Align, AllZeroIsDegenerate) {
  const auto zero = impact::testing::constant_trace(200, {});
  const auto a = align_by_xcorr(zero, pulse_trace(200, 60, 20), 10);
  EXPECT_EQ(a.shift, 0);
  EXPECT_TRUE(a.degenerate);
  EXPECT_THROW(align_by_xcorr(zero, zero, 100), std::invalid_argument);
}

TEST(ShiftTrace, ZeroFills) {
  const auto t = pulse_trace(50, 20, 10);
  const auto fwd = shift_trace(t, 3), back = shift_trace(t, -3);
  for (std::size_t i = 0; i < 50; ++i) {
    EXPECT_EQ(fwd.channel(1)[i], i + 3 < 50 ? t.channel(1)[i + 3] : 0.0);
    EXPECT_EQ(back.channel(1)[i], i >= 3 ? t.channel(1)[i - 3] : 0.0);
  }
}

TEST(Differentiate, RampAndConstant) {
  Series ramp(50);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = double(i) / 1000.0;
  for (double v : differentiate(ramp, 1000.0)) EXPECT_NEAR(v, 1.0, 1e-9);
  for (double v : differentiate(Series(20, 4.0), 1000.0)) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(differentiate(Series(2, 1.0), 1000.0), std::invalid_argument);
}

TEST(Differentiate, ExactForQuadratics) {
  Series q(30);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = 3.0 * double(i * i) - 2.0 * double(i) + 1.0;
  const Series d = differentiate(q, 1.0);
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(d[i], 6.0 * double(i) - 2.0, 1e-9);
}

TEST(Differentiate, SineDerivative) {
  const double fs = 1000.0, w = 2.0 * M_PI * 10.0;
  Series s(500);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(w * double(i) / fs);
  const Series d = differentiate(s, fs);
  double worst = 0;
  for (std::size_t i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(d[i] - w * std::cos(w * double(i) / fs)));
  EXPECT_LT(worst, 0.005 * w);
}

TEST(CumulativeIntegral, ClosedForms) {
  EXPECT_NEAR(cumulative_integral(Series(100, 1.0), 1000.0).back(), 0.099, 1e-12);
  for (double v : cumulative_integral(Series(10, 0.0), 1000.0)) EXPECT_EQ(v, 0.0);
  Series ramp(1000);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = double(i) / 1000.0;
  EXPECT_NEAR(cumulative_integral(ramp, 1000.0).back(), 0.5, 1e-3);
  EXPECT_EQ(cumulative_integral(ramp, 1000.0).front(), 0.0);
}

TEST(CumulativeIntegral, DifferentiateRecoversSlowSignal) {
  const double fs = 1000.0, w = 2.0 * M_PI * 0.2;
  Series s(400);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::cos(w * double(i) / fs) + 0.5;
  const Series back = differentiate(cumulative_integral(s, fs), fs);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(back[i], s[i], 1e-6);
}

TEST(Windows, Counts) {
  EXPECT_EQ(window_count(200), 20u);
  EXPECT_EQ(window_count(100), 1u);
  EXPECT_EQ(window_count(104), 1u);
  EXPECT_EQ(window_count(110), 2u);
  EXPECT_EQ(window_count(200) * 113, 2260u);
  EXPECT_THROW(window_count(99), std::invalid_argument);
}

TEST(Windows, AugmentSlicesEveryComponent) {
  Rng rng(1);
  const auto noisy = impact::testing::random_trace(rng, 200);
  const auto ref = impact::testing::random_trace(rng, 200);
  const auto ex = augment("x", noisy, ref);
  ASSERT_EQ(ex.size(), 120u);
  for (const auto& e : ex) {
    ASSERT_EQ(e.input.size(), 100u);
    EXPECT_EQ(e.offset_samples % 5, 0u);
    EXPECT_LT(e.offset_samples, 100u);
    EXPECT_EQ(e.source_id, "x");
    const auto& n = noisy.channel(e.component);
    const auto& r = ref.channel(e.component);
    EXPECT_TRUE(std::equal(e.input.begin(), e.input.end(), n.begin() + long(e.offset_samples)));
    EXPECT_TRUE(std::equal(e.target.begin(), e.target.end(), r.begin() + long(e.offset_samples)));
  }
}

TEST(Windows, EvaluationOffsetAnchorsPeak) {
  EXPECT_EQ(evaluation_offset(pulse_trace(200, 70, 10)), 50u);
  EXPECT_EQ(evaluation_offset(pulse_trace(200, 10, 10)), 0u);
  EXPECT_EQ(evaluation_offset(pulse_trace(200, 190, 10)), 100u);
  EXPECT_EQ(evaluation_offset(pulse_trace(100, 70, 10)), 0u);
}
