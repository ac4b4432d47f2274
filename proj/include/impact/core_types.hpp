#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace impact {

inline constexpr double kCanonicalSampleRateHz = 1000.0;
inline constexpr double kStandardGravity = 9.80665;  // m/s^2 per g

/// Kinematic channels. The first six are stored in every trace and each has
/// its own denoising model; the two magnitudes exist only for evaluation.
enum class ComponentId : int {
  LinAccX = 0,
  LinAccY,
  LinAccZ,
  AngVelX,
  AngVelY,
  AngVelZ,
  LinAccMag,
  AngVelMag,
};

inline constexpr int kNumTrainable = 6;

inline constexpr std::array<ComponentId, kNumTrainable> kTrainableComponents = {
    ComponentId::LinAccX, ComponentId::LinAccY, ComponentId::LinAccZ,
    ComponentId::AngVelX, ComponentId::AngVelY, ComponentId::AngVelZ};

inline constexpr std::array<ComponentId, 8> kEvaluationComponents = {
    ComponentId::LinAccX, ComponentId::LinAccY,   ComponentId::LinAccZ,
    ComponentId::AngVelX, ComponentId::AngVelY,   ComponentId::AngVelZ,
    ComponentId::LinAccMag, ComponentId::AngVelMag};

constexpr int index_of(ComponentId c) { return static_cast<int>(c); }
constexpr bool is_trainable(ComponentId c) { return index_of(c) < kNumTrainable; }

std::string_view component_name(ComponentId c);
ComponentId component_from_name(std::string_view name);

enum class VectorKind { LinAcc, AngVel };

using Series = std::vector<double>;

/// Uniformly sampled six-channel head kinematics. Linear acceleration is in g,
/// angular velocity in rad/s. Immutable once constructed.
class KinematicsTrace {
 public:
  using Channels = std::array<Series, kNumTrainable>;

  explicit KinematicsTrace(Channels channels,
                           double sample_rate_hz = kCanonicalSampleRateHz,
                           double t0_s = 0.0);

  std::size_t size() const { return channels_[0].size(); }
  double sample_rate_hz() const { return sample_rate_hz_; }
  double t0_s() const { return t0_s_; }
  double time_at(std::size_t i) const {
    return t0_s_ + static_cast<double>(i) / sample_rate_hz_;
  }

  const Series& channel(ComponentId c) const;
  const Series& channel(int index) const { return channels_.at(index); }
  const Channels& channels() const { return channels_; }

  /// Samples [offset, offset + length) as a new trace with t0 advanced.
  KinematicsTrace slice(std::size_t offset, std::size_t length) const;

  bool operator==(const KinematicsTrace&) const = default;

 private:
  Channels channels_;
  double sample_rate_hz_;
  double t0_s_;
};

/// Pointwise Euclidean norm of the three linear-acceleration or
/// angular-velocity channels.
Series magnitude_trace(const KinematicsTrace& trace, VectorKind kind);

/// Channel series for any component, computing magnitudes on demand.
Series component_series(const KinematicsTrace& trace, ComponentId c);

struct ImpactRecord {
  std::string impact_id;
  KinematicsTrace noisy;
  std::optional<KinematicsTrace> reference;
  std::map<std::string, std::string> metadata;

  /// Throws std::invalid_argument when the reference does not match the
  /// noisy trace in length or sample rate.
  void validate() const;
};

enum class Split { Train, Val, Test };

std::string_view split_name(Split s);
Split split_from_name(std::string_view name);

struct SplitFractions {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

class ImpactDataset {
 public:
  ImpactDataset() = default;
  ImpactDataset(std::vector<ImpactRecord> records,
                std::map<std::string, Split> split, std::uint64_t rng_seed);

  const std::vector<ImpactRecord>& records() const { return records_; }
  const std::map<std::string, Split>& split() const { return split_; }
  std::uint64_t rng_seed() const { return rng_seed_; }

  Split split_of(const std::string& impact_id) const;
  std::vector<const ImpactRecord*> records_in(Split s) const;
  std::size_t count(Split s) const;

 private:
  std::vector<ImpactRecord> records_;
  std::map<std::string, Split> split_;
  std::uint64_t rng_seed_ = 0;
};

/// Split sizes for n records: validation and test take ceil(fraction * n),
/// training gets the rest (163 -> 113/25/25, 3 -> 1/1/1).
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitFractions& f = {});

/// Seeded shuffle of the sorted record ids followed by a train/val/test cut.
/// Depends only on the ids and the seed.
ImpactDataset partition(std::vector<ImpactRecord> records, std::uint64_t seed,
                        const SplitFractions& fractions = {});

}  // namespace impact
