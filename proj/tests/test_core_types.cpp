#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "impact/core_types.hpp"
#include "impact/trace_io.hpp"
#include "test_util.hpp"

using namespace impact;
using impact::testing::constant_trace;

namespace {

std::vector<ImpactRecord> make_records(std::size_t n, std::size_t len = 10) {
  std::vector<ImpactRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"imp" + std::to_string(i), constant_trace(len, {1, 2, 3, 4, 5, double(i)}), std::nullopt, {}});
  }
  return out;
}

}  // namespace

TEST(ComponentNames, RoundTrip) {
  for (ComponentId c : kEvaluationComponents) EXPECT_EQ(component_from_name(component_name(c)), c);
  EXPECT_THROW(component_from_name("lin_acc_w"), std::invalid_argument);
  EXPECT_EQ(kTrainableComponents.size(), 6u);
  EXPECT_FALSE(is_trainable(ComponentId::LinAccMag));
}

TEST(KinematicsTrace, RejectsInvalidInput) {
  KinematicsTrace::Channels ch;
  for (auto& c : ch) c.assign(5, 0.0);
  EXPECT_NO_THROW(KinematicsTrace{ch});
  EXPECT_THROW(KinematicsTrace(ch, 0.0), std::invalid_argument);

  auto ragged = ch;
  ragged[3].push_back(1.0);
  EXPECT_THROW(KinematicsTrace{ragged}, std::invalid_argument);

  auto bad = ch;
  bad[2][1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(KinematicsTrace{bad}, std::invalid_argument);

  KinematicsTrace::Channels empty;
  EXPECT_THROW(KinematicsTrace{empty}, std::invalid_argument);
}

TEST(KinematicsTrace, TimeAndSlice) {
  KinematicsTrace::Channels ch;
  for (auto& c : ch) {
    c.resize(10);
    for (std::size_t i = 0; i < 10; ++i) c[i] = double(i);
  }
  const KinematicsTrace t(ch, 1000.0, 0.5);
  EXPECT_DOUBLE_EQ(t.time_at(4), 0.504);
  const auto s = t.slice(3, 4);
  EXPECT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s.channel(ComponentId::AngVelY)[0], 3.0);
  EXPECT_DOUBLE_EQ(s.t0_s(), 0.503);
  EXPECT_THROW(t.slice(8, 3), std::out_of_range);
  EXPECT_THROW(t.channel(ComponentId::LinAccMag), std::invalid_argument);
}

TEST(Magnitude, PythagoreanTriple) {
  const auto t = constant_trace(7, {3, 4, 0, 1, 1, 1});
  for (double v : magnitude_trace(t, VectorKind::LinAcc)) EXPECT_DOUBLE_EQ(v, 5.0);
  for (double v : magnitude_trace(t, VectorKind::AngVel)) EXPECT_NEAR(v, 1.7320508, 1e-7);
  const auto z = constant_trace(4, {0, 0, 0, 0, 0, 0});
  for (double v : component_series(z, ComponentId::AngVelMag)) EXPECT_EQ(v, 0.0);
}

TEST(ImpactRecord, ReferenceMustMatchNoisy) {
  ImpactRecord r{"a", constant_trace(5, {}), constant_trace(6, {}), {}};
  EXPECT_THROW(r.validate(), std::invalid_argument);
  r.reference = constant_trace(5, {});
  EXPECT_NO_THROW(r.validate());
}

TEST(Partition, PaperCounts) {
  EXPECT_EQ(split_sizes(163), (std::array<std::size_t, 3>{113, 25, 25}));
  EXPECT_EQ(split_sizes(3), (std::array<std::size_t, 3>{1, 1, 1}));
  EXPECT_EQ(split_sizes(10), (std::array<std::size_t, 3>{6, 2, 2}));
  EXPECT_THROW(split_sizes(2), std::invalid_argument);

  const auto ds = partition(make_records(163), 11);
  EXPECT_EQ(ds.count(Split::Train), 113u);
  EXPECT_EQ(ds.count(Split::Val), 25u);
  EXPECT_EQ(ds.count(Split::Test), 25u);
}

TEST(Partition, DeterministicAndOrderIndependent) {
  const auto a = partition(make_records(10), 42);
  const auto b = partition(make_records(10), 42);
  EXPECT_EQ(a.split(), b.split());

  auto shuffled = make_records(10);
  std::reverse(shuffled.begin(), shuffled.end());
  EXPECT_EQ(partition(std::move(shuffled), 42).split(), a.split());

  // Some seed must move at least one record.
  bool differs = false;
  for (std::uint64_t s = 0; s < 5 && !differs; ++s) differs = partition(make_records(10), s).split() != a.split();
  EXPECT_TRUE(differs);
}

TEST(Dataset, RejectsInconsistentSplits) {
  auto recs = make_records(3);
  std::map<std::string, Split> split{{"imp0", Split::Train}, {"imp1", Split::Val}};
  EXPECT_THROW(ImpactDataset(recs, split, 0), std::invalid_argument);
  split["imp2"] = Split::Test;
  split["ghost"] = Split::Test;
  EXPECT_THROW(ImpactDataset(recs, split, 0), std::invalid_argument);
  recs.push_back(recs.front());
  split.erase("ghost");
  EXPECT_THROW(ImpactDataset(recs, split, 0), std::invalid_argument);
}

TEST(TraceIo, CsvRoundTripIsExact) {
  Rng rng(5);
  const auto t = impact::testing::random_trace(rng, 37, 123.0);
  const auto back = io::trace_from_csv(io::trace_to_csv(t));
  EXPECT_EQ(back, t);
  EXPECT_EQ(io::trace_to_csv(t).substr(0, io::kTraceCsvHeader.size()), io::kTraceCsvHeader);
}

TEST(TraceIo, RejectsMalformedCsv) {
  EXPECT_THROW(io::trace_from_csv("time,a\n0,1\n"), std::runtime_error);
  const std::string header(io::kTraceCsvHeader);
  EXPECT_THROW(io::trace_from_csv(header + "\n0,1,2,3,4,5\n"), std::runtime_error);
  EXPECT_THROW(io::trace_from_csv(header + "\n0,1,2,3,4,5,x\n"), std::runtime_error);
  // 500 Hz sampling is not the canonical rate.
  EXPECT_THROW(io::trace_from_csv(header + "\n0,1,2,3,4,5,6\n0.002,1,2,3,4,5,6\n"), std::runtime_error);
}

TEST(TraceIo, DatasetRoundTrip) {
  auto recs = make_records(5, 12);
  recs[1].reference = constant_trace(12, {9, 8, 7, 6, 5, 4});
  recs[2].metadata["location"] = "side";
  const auto ds = partition(std::move(recs), 3);
  const auto dir = impact::testing::scratch_dir("dataset_roundtrip");
  const auto manifest = io::write_dataset(ds, dir);
  const auto back = io::read_dataset(manifest);
  ASSERT_EQ(back.records().size(), 5u);
  EXPECT_EQ(back.split(), ds.split());
  EXPECT_EQ(back.rng_seed(), 3u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(back.records()[i].impact_id, ds.records()[i].impact_id);
    EXPECT_EQ(back.records()[i].noisy, ds.records()[i].noisy);
    EXPECT_EQ(back.records()[i].reference, ds.records()[i].reference);
    EXPECT_EQ(back.records()[i].metadata, ds.records()[i].metadata);
  }
  EXPECT_THROW(io::write_dataset(ds, dir / "missing"), std::runtime_error);
}
