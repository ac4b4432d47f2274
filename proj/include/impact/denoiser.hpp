#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "impact/core_types.hpp"
#include "impact/model_io.hpp"
#include "impact/neuralnet.hpp"
#include "impact/parallel.hpp"
#include "impact/sigproc.hpp"

namespace impact::denoise {

using nn::Strategy;

/// Training target for one window: the reference itself (Direct) or the
/// correction reference - noisy that is added back at inference (NoiseResidual).
Series make_targets(const Series& noisy, const Series& reference, Strategy strategy);

/// Denoised window from the network output under the given strategy.
Series apply_strategy(const Series& noisy, const Series& prediction, Strategy strategy);

Series normalize(const Series& window, double scale);
Series denormalize(const Series& window, double scale);

/// Population standard deviation of a component's noisy samples over the
/// training records (1.0 if the channel is identically zero).
double component_scale(const std::vector<const ImpactRecord*>& train_records, ComponentId c);

/// Six per-component models. Whole-trace denoising requires all six.
class DenoiserSuite {
 public:
  void set(ComponentModel model);
  bool has(ComponentId c) const;
  bool complete() const;
  const ComponentModel& model(ComponentId c) const;

 private:
  std::array<std::optional<ComponentModel>, kNumTrainable> models_;
};

std::string suite_to_json(const DenoiserSuite& suite);
DenoiserSuite suite_from_json(const std::string& text);

struct HyperGrid {
  std::vector<nn::ChannelPlan> channel_plans{{16, 32, 64}, {20, 40, 80}, {32, 64, 128}};
  std::vector<double> lr0{0.005, 0.01};
  std::vector<int> epochs{300, 400, 500, 600, 700};
  std::vector<double> l2{0.001};
  std::vector<int> kernel_sizes{10};
  std::vector<Strategy> strategies{Strategy::Direct, Strategy::NoiseResidual};
  int batch_size = 32;
  int early_stop_patience = 50;
  std::uint64_t seed = 0;

  void validate() const;
  /// Every grid point, ordered by the selection tie-break: smaller channel
  /// plan, lower lr0, Direct before NoiseResidual, then epochs, l2, kernel size.
  std::vector<nn::TrainingConfig> points() const;
};

/// A grid with exactly one point.
HyperGrid singleton_grid(const nn::TrainingConfig& cfg);

struct GridPointReport {
  nn::TrainingConfig config;
  double val_rmse = 0;  ///< physical units, mean over validation windows
  int best_epoch = 0;
  int epochs_run = 0;
  bool stopped_early = false;
  std::vector<nn::EpochRecord> history;
};

struct ComponentReport {
  ComponentId component = ComponentId::LinAccX;
  double scale = 1;
  std::vector<GridPointReport> grid;
  std::size_t selected = 0;
};

struct FitResult {
  DenoiserSuite suite;
  std::vector<ComponentReport> reports;
};

/// Examples for one component: sliding windows over every training and every
/// validation record, normalized by `scale` and with strategy-specific
/// targets.
struct ComponentExamples {
  std::vector<sigproc::WindowedExample> train;
  std::vector<sigproc::WindowedExample> val;
};

ComponentExamples component_examples(const ImpactDataset& dataset, ComponentId c, double scale,
                                     Strategy strategy);

/// Trains every grid point for every component on the training split and
/// keeps the one with the lowest validation RMSE. The dataset must already be
/// filtered and aligned, with references on every train and val record.
FitResult fit_suite(const ImpactDataset& dataset, const HyperGrid& grid,
                    int threads = worker_threads());

/// Offsets of consecutive window-length frames, plus a final frame ending at
/// the last sample when the length is not a multiple of the window.
std::vector<std::size_t> frame_offsets(std::size_t length, std::size_t window = sigproc::kWindow);

/// Frame-wise denoising of all six channels. Where the tail frame overlaps the
/// previous one, the tail frame's output is used.
KinematicsTrace denoise_trace(const DenoiserSuite& suite, const KinematicsTrace& trace);

}  // namespace impact::denoise
