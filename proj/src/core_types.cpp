#include "impact/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "impact/rng.hpp"

namespace impact {

namespace {

constexpr std::array<std::string_view, 8> kComponentNames = {
    "lin_acc_x", "lin_acc_y", "lin_acc_z", "ang_vel_x",
    "ang_vel_y", "ang_vel_z", "lin_acc_mag", "ang_vel_mag"};

}  // namespace

std::string_view component_name(ComponentId c) {
  return kComponentNames.at(static_cast<std::size_t>(index_of(c)));
}

ComponentId component_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kComponentNames.size(); ++i) {
    if (kComponentNames[i] == name) return static_cast<ComponentId>(i);
  }
  throw std::invalid_argument("unknown component: " + std::string(name));
}

KinematicsTrace::KinematicsTrace(Channels channels, double sample_rate_hz, double t0_s)
    : channels_(std::move(channels)), sample_rate_hz_(sample_rate_hz), t0_s_(t0_s) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw std::invalid_argument("sample rate must be positive");
  }
  if (!std::isfinite(t0_s_)) throw std::invalid_argument("t0 must be finite");
  const std::size_t n = channels_[0].size();
  if (n == 0) throw std::invalid_argument("trace must have at least one sample");
  for (const auto& ch : channels_) {
    if (ch.size() != n) throw std::invalid_argument("trace channels differ in length");
    for (double v : ch) {
      if (!std::isfinite(v)) throw std::invalid_argument("trace contains a non-finite value");
    }
  }
}

const Series& KinematicsTrace::channel(ComponentId c) const {
  if (!is_trainable(c)) {
    throw std::invalid_argument("magnitude components are not stored in traces");
  }
  return channels_[static_cast<std::size_t>(index_of(c))];
}

KinematicsTrace KinematicsTrace::slice(std::size_t offset, std::size_t length) const {
  if (length == 0 || offset + length > size()) {
    throw std::out_of_range("trace slice out of range");
  }
  Channels out;
  for (std::size_t c = 0; c < out.size(); ++c) {
    const auto first = channels_[c].begin() + static_cast<std::ptrdiff_t>(offset);
    out[c].assign(first, first + static_cast<std::ptrdiff_t>(length));
  }
  return KinematicsTrace(std::move(out), sample_rate_hz_, time_at(offset));
}

Series magnitude_trace(const KinematicsTrace& trace, VectorKind kind) {
  const int base = kind == VectorKind::LinAcc ? 0 : 3;
  const auto& x = trace.channel(base);
  const auto& y = trace.channel(base + 1);
  const auto& z = trace.channel(base + 2);
  Series out(trace.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
  }
  return out;
}

Series component_series(const KinematicsTrace& trace, ComponentId c) {
  switch (c) {
    case ComponentId::LinAccMag:
      return magnitude_trace(trace, VectorKind::LinAcc);
    case ComponentId::AngVelMag:
      return magnitude_trace(trace, VectorKind::AngVel);
    default:
      return trace.channel(c);
  }
}

void ImpactRecord::validate() const {
  if (impact_id.empty()) throw std::invalid_argument("impact_id must not be empty");
  if (reference) {
    if (reference->size() != noisy.size()) {
      throw std::invalid_argument("reference and noisy traces differ in length for " +
                                  impact_id);
    }
    if (reference->sample_rate_hz() != noisy.sample_rate_hz()) {
      throw std::invalid_argument("reference and noisy traces differ in sample rate for " +
                                  impact_id);
    }
  }
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::Train:
      return "train";
    case Split::Val:
      return "val";
    case Split::Test:
      return "test";
  }
  return "train";
}

Split split_from_name(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  throw std::invalid_argument("unknown split: " + std::string(name));
}

ImpactDataset::ImpactDataset(std::vector<ImpactRecord> records,
                             std::map<std::string, Split> split, std::uint64_t rng_seed)
    : records_(std::move(records)), split_(std::move(split)), rng_seed_(rng_seed) {
  std::map<std::string, int> seen;
  for (const auto& r : records_) {
    r.validate();
    if (++seen[r.impact_id] > 1) {
      throw std::invalid_argument("duplicate impact_id: " + r.impact_id);
    }
    if (!split_.contains(r.impact_id)) {
      throw std::invalid_argument("impact_id missing from split: " + r.impact_id);
    }
  }
  for (const auto& [id, s] : split_) {
    if (!seen.contains(id)) throw std::invalid_argument("split names unknown impact: " + id);
  }
}

Split ImpactDataset::split_of(const std::string& impact_id) const {
  return split_.at(impact_id);
}

std::vector<const ImpactRecord*> ImpactDataset::records_in(Split s) const {
  std::vector<const ImpactRecord*> out;
  for (const auto& r : records_) {
    if (split_.at(r.impact_id) == s) out.push_back(&r);
  }
  return out;
}

std::size_t ImpactDataset::count(Split s) const {
  return static_cast<std::size_t>(
      std::count_if(split_.begin(), split_.end(), [s](const auto& kv) { return kv.second == s; }));
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitFractions& f) {
  if (n < 3) throw std::invalid_argument("partition needs at least 3 records");
  if (f.train < 0 || f.val < 0 || f.test < 0 ||
      std::abs(f.train + f.val + f.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must be non-negative and sum to 1");
  }
  const auto share = [n](double frac) {
    const auto k = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n) - 1e-9));
    return std::max<std::size_t>(k, 1);
  };
  const std::size_t val = share(f.val);
  const std::size_t test = share(f.test);
  if (val + test >= n) throw std::invalid_argument("split leaves no training records");
  return {n - val - test, val, test};
}

ImpactDataset partition(std::vector<ImpactRecord> records, std::uint64_t seed,
                        const SplitFractions& fractions) {
  const auto sizes = split_sizes(records.size(), fractions);
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.impact_id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument("duplicate impact ids");
  }
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(ids));

  std::map<std::string, Split> split;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    split[ids[i]] = i < sizes[0]               ? Split::Train
                    : i < sizes[0] + sizes[1] ? Split::Val
                                              : Split::Test;
  }
  return ImpactDataset(std::move(records), std::move(split), seed);
}

}  // namespace impact
