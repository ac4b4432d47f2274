#include <gtest/gtest.h>

#include <cmath>

#include "impact/denoiser.hpp"
#include "impact/synth_data.hpp"
#include "test_util.hpp"

using namespace impact;
using namespace impact::denoise;

namespace {

ComponentModel random_model(ComponentId c, Strategy s, std::uint64_t seed, double scale = 1.0) {
  auto net = nn::make_network({2, 3, 4}, 10);
  nn::initialize(net, seed);
  auto p = nn::get_parameters(net);
  Rng rng(seed);
  for (double& v : p) v += rng.uniform(-0.05, 0.05);
  nn::set_parameters(net, p);
  return {c, s, scale, net};
}

DenoiserSuite random_suite(Strategy s) {
  DenoiserSuite suite;
  for (ComponentId c : kTrainableComponents) suite.set(random_model(c, s, 100 + std::uint64_t(index_of(c)), 2.5));
  return suite;
}

synth::SynthConfig small_synth() {
  synth::SynthConfig cfg;
  cfg.n_impacts = 12;
  cfg.seed = 5;
  return cfg;
}

HyperGrid tiny_grid() {
  HyperGrid g;
  g.channel_plans = {{2, 4, 8}};
  g.lr0 = {0.005, 0.02};
  g.epochs = {2};
  g.strategies = {Strategy::Direct};
  g.seed = 9;
  return g;
}

}  // namespace

TEST(Strategy, TargetsAndReconstruction) {
  const Series n{1, 2, 3}, r{1.5, 1, 4};
  EXPECT_EQ(make_targets(n, n, Strategy::NoiseResidual), (Series{0, 0, 0}));
  EXPECT_EQ(make_targets(n, r, Strategy::Direct), r);
  EXPECT_EQ(apply_strategy(n, make_targets(n, r, Strategy::NoiseResidual), Strategy::NoiseResidual), r);
  EXPECT_EQ(apply_strategy(n, make_targets(n, r, Strategy::Direct), Strategy::Direct), r);
  EXPECT_EQ(nn::strategy_from_name(nn::strategy_name(Strategy::NoiseResidual)), Strategy::NoiseResidual);
  EXPECT_THROW(nn::strategy_from_name("wiener"), std::invalid_argument);
}

TEST(Normalization, RoundTripAndScale) {
  const Series x{0.1, -7.25, 3.0};
  EXPECT_EQ(normalize(x, 1.0), x);
  const Series back = denormalize(normalize(x, 3.7), 3.7);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
  EXPECT_THROW(normalize(x, 0.0), std::invalid_argument);
}

TEST(Normalization, PopulationStdOfTrainingNoisy) {
  KinematicsTrace::Channels a, b;
  for (std::size_t c = 0; c < 6; ++c) {
    a[c] = {1, 2, 3};
    b[c] = {4, 5, 6};
  }
  a[5] = {0, 0, 0};
  b[5] = {0, 0, 0};
  const ImpactRecord ra{"a", KinematicsTrace(a), std::nullopt, {}}, rb{"b", KinematicsTrace(b), std::nullopt, {}};
  const std::vector<const ImpactRecord*> recs{&ra, &rb};
  EXPECT_NEAR(component_scale(recs, ComponentId::LinAccX), std::sqrt(35.0 / 12.0), 1e-14);
  EXPECT_EQ(component_scale(recs, ComponentId::AngVelZ), 1.0);
}

TEST(Frames, Offsets) {
  EXPECT_EQ(frame_offsets(100), (std::vector<std::size_t>{0}));
  EXPECT_EQ(frame_offsets(250), (std::vector<std::size_t>{0, 100, 150}));
  EXPECT_EQ(frame_offsets(300), (std::vector<std::size_t>{0, 100, 200}));
  EXPECT_THROW(frame_offsets(99), std::invalid_argument);
}

TEST(DenoiseTrace, ZeroResidualIsIdentity) {
  DenoiserSuite suite;
  for (ComponentId c : kTrainableComponents) {
    suite.set({c, Strategy::NoiseResidual, 4.0, nn::make_network({2, 3, 4}, 10)});
  }
  Rng rng(1);
  const auto t = impact::testing::random_trace(rng, 250);
  EXPECT_EQ(denoise_trace(suite, t), t);
}

TEST(DenoiseTrace, TailFrameWinsOverlap) {
  const auto suite = random_suite(Strategy::Direct);
  Rng rng(2);
  const auto t = impact::testing::random_trace(rng, 250);
  const auto y = denoise_trace(suite, t);
  for (ComponentId c : kTrainableComponents) {
    const auto& m = suite.model(c);
    const auto& x = t.channel(c);
    const auto frame = [&](std::size_t off) {
      return denormalize(nn::network_forward(m.network, normalize(Series(x.begin() + long(off), x.begin() + long(off) + 100), m.scale)), m.scale);
    };
    const Series f0 = frame(0), f1 = frame(100), f2 = frame(150);
    const auto& out = y.channel(c);
    for (std::size_t i = 0; i < 100; ++i) EXPECT_NEAR(out[i], f0[i], 1e-12);
    for (std::size_t i = 100; i < 150; ++i) EXPECT_NEAR(out[i], f1[i - 100], 1e-12);
    for (std::size_t i = 150; i < 250; ++i) EXPECT_NEAR(out[i], f2[i - 150], 1e-12);
    EXPECT_GT(std::abs(f1[60] - f2[10]), 1e-9);  // the two frames really disagree at sample 160
  }
}

TEST(DenoiseTrace, RequiresCompleteSuite) {
  DenoiserSuite suite;
  suite.set(random_model(ComponentId::LinAccX, Strategy::Direct, 1));
  EXPECT_FALSE(suite.complete());
  EXPECT_THROW(denoise_trace(suite, impact::testing::constant_trace(100, {})), std::invalid_argument);
  EXPECT_THROW(suite.model(ComponentId::AngVelX), std::invalid_argument);
}

TEST(SuiteJson, RoundTripIsBitExact) {
  const auto suite = random_suite(Strategy::NoiseResidual);
  const std::string text = suite_to_json(suite);
  const auto back = suite_from_json(text);
  for (ComponentId c : kTrainableComponents) {
    EXPECT_EQ(nn::get_parameters(back.model(c).network), nn::get_parameters(suite.model(c).network));
    EXPECT_EQ(back.model(c).scale, suite.model(c).scale);
    EXPECT_EQ(back.model(c).strategy, Strategy::NoiseResidual);
  }
  EXPECT_EQ(suite_to_json(back), text);
  EXPECT_THROW(suite_from_json("{\"format_version\":1,\"models\":[]}"), std::exception);
}

TEST(HyperGrid, DefaultGridOrderAndSize) {
  const HyperGrid g;
  const auto pts = g.points();
  ASSERT_EQ(pts.size(), 60u);
  EXPECT_EQ(pts.front().channel_plan, (nn::ChannelPlan{16, 32, 64}));
  EXPECT_EQ(pts.front().lr0, 0.005);
  EXPECT_EQ(pts.front().strategy, Strategy::Direct);
  EXPECT_EQ(pts.front().epochs, 300);
  EXPECT_EQ(pts[5].strategy, Strategy::NoiseResidual);
  EXPECT_EQ(pts.back().channel_plan, (nn::ChannelPlan{32, 64, 128}));
  HyperGrid empty;
  empty.lr0.clear();
  EXPECT_THROW(empty.validate(), std::invalid_argument);
}

TEST(HyperGrid, SingletonHasOnePoint) {
  nn::TrainingConfig cfg;
  cfg.lr0 = 0.01;
  cfg.strategy = Strategy::NoiseResidual;
  const auto pts = singleton_grid(cfg).points();
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].lr0, 0.01);
  EXPECT_EQ(pts[0].strategy, Strategy::NoiseResidual);
}

TEST(ComponentExamples, SlidingWindowCounts) {
  const auto ds = synth::generate(synth::SynthConfig{});
  const auto ex = component_examples(ds, ComponentId::AngVelY, 2.0, Strategy::Direct);
  EXPECT_EQ(ex.train.size(), 2260u);
  EXPECT_EQ(ex.val.size(), 25u * 20u);
  for (const auto& e : ex.train) {
    ASSERT_EQ(e.input.size(), 100u);
    EXPECT_EQ(e.component, ComponentId::AngVelY);
  }
  const auto* rec = ds.records_in(Split::Train).front();
  EXPECT_EQ(ex.train[3].input[7], rec->noisy.channel(ComponentId::AngVelY)[15 + 7] / 2.0);
}

TEST(FitSuite, SelectsMinimumAndIsDeterministic) {
  const auto ds = synth::generate(small_synth());
  const auto grid = tiny_grid();
  const auto a = fit_suite(ds, grid, 1);
  ASSERT_EQ(a.reports.size(), 6u);
  for (const auto& r : a.reports) {
    ASSERT_EQ(r.grid.size(), 2u);
    for (const auto& g : r.grid) EXPECT_LE(r.grid[r.selected].val_rmse, g.val_rmse);
    EXPECT_EQ(a.suite.model(r.component).network.channel_plan, (nn::ChannelPlan{2, 4, 8}));
  }
  const auto b = fit_suite(ds, grid, 3);
  EXPECT_EQ(suite_to_json(a.suite), suite_to_json(b.suite));
}

TEST(FitSuite, SingletonGridTrainsOncePerComponent) {
  const auto ds = synth::generate(small_synth());
  nn::TrainingConfig cfg;
  cfg.channel_plan = {2, 2, 2};
  cfg.epochs = 1;
  const auto fit = fit_suite(ds, singleton_grid(cfg), 1);
  for (const auto& r : fit.reports) {
    EXPECT_EQ(r.grid.size(), 1u);
    EXPECT_EQ(r.selected, 0u);
    EXPECT_EQ(r.grid[0].epochs_run, 1);
  }
  EXPECT_TRUE(fit.suite.complete());
}
