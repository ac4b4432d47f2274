#include "impact/denoiser.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "impact/rng.hpp"
#include "json.hpp"

namespace impact::denoise {

Series make_targets(const Series& noisy, const Series& reference, Strategy strategy) {
  if (noisy.size() != reference.size()) {
    throw std::invalid_argument("make_targets: windows differ in length");
  }
  if (strategy == Strategy::Direct) return reference;
  Series t(noisy.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = reference[i] - noisy[i];
  return t;
}

Series apply_strategy(const Series& noisy, const Series& prediction, Strategy strategy) {
  if (noisy.size() != prediction.size()) {
    throw std::invalid_argument("apply_strategy: windows differ in length");
  }
  if (strategy == Strategy::Direct) return prediction;
  Series out(noisy.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = noisy[i] + prediction[i];
  return out;
}

Series normalize(const Series& window, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("normalization scale must be positive");
  Series out(window);
  for (double& v : out) v /= scale;
  return out;
}

Series denormalize(const Series& window, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("normalization scale must be positive");
  Series out(window);
  for (double& v : out) v *= scale;
  return out;
}

double component_scale(const std::vector<const ImpactRecord*>& train_records, ComponentId c) {
  double sum = 0, sq = 0;
  std::size_t n = 0;
  for (const auto* r : train_records) {
    for (double v : r->noisy.channel(c)) {
      sum += v;
      ++n;
    }
  }
  if (n == 0) throw std::invalid_argument("component_scale: no training samples");
  const double mean = sum / static_cast<double>(n);
  for (const auto* r : train_records) {
    for (double v : r->noisy.channel(c)) sq += (v - mean) * (v - mean);
  }
  const double sd = std::sqrt(sq / static_cast<double>(n));
  return sd > 0.0 ? sd : 1.0;
}

void DenoiserSuite::set(ComponentModel model) {
  if (!is_trainable(model.component)) throw std::invalid_argument("suite models must be per-axis");
  if (!(model.scale > 0.0)) throw std::invalid_argument("model scale must be positive");
  models_[static_cast<std::size_t>(index_of(model.component))] = std::move(model);
}

bool DenoiserSuite::has(ComponentId c) const {
  return is_trainable(c) && models_[static_cast<std::size_t>(index_of(c))].has_value();
}

bool DenoiserSuite::complete() const {
  return std::all_of(models_.begin(), models_.end(), [](const auto& m) { return m.has_value(); });
}

const ComponentModel& DenoiserSuite::model(ComponentId c) const {
  if (!has(c)) {
    throw std::invalid_argument(fmt::format("suite has no model for {}", component_name(c)));
  }
  return *models_[static_cast<std::size_t>(index_of(c))];
}

std::string suite_to_json(const DenoiserSuite& suite) {
  if (!suite.complete()) throw std::invalid_argument("suite is missing component models");
  std::string out = "{\n  \"format_version\":1,\n  \"models\":[\n    ";
  for (std::size_t i = 0; i < kTrainableComponents.size(); ++i) {
    if (i) out += ",\n    ";
    out += io::model_to_json(suite.model(kTrainableComponents[i]), 4);
  }
  out += "\n  ]\n}\n";
  return out;
}

DenoiserSuite suite_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("suite file: ") + e.what());
  }
  if (j.value("format_version", 0) != 1) throw std::runtime_error("suite file: unsupported format_version");
  DenoiserSuite suite;
  for (const auto& m : j.at("models")) {
    ComponentModel model = io::model_from_json(m.dump());
    if (suite.has(model.component)) {
      throw std::runtime_error(
          fmt::format("suite file: duplicate model for {}", component_name(model.component)));
    }
    suite.set(std::move(model));
  }
  if (!suite.complete()) throw std::runtime_error("suite file: expected six component models");
  return suite;
}

void HyperGrid::validate() const {
  if (channel_plans.empty() || lr0.empty() || epochs.empty() || l2.empty() ||
      kernel_sizes.empty() || strategies.empty()) {
    throw std::invalid_argument("hyperparameter grid has an empty axis");
  }
  for (const auto& cfg : points()) cfg.validate();
}

std::vector<nn::TrainingConfig> HyperGrid::points() const {
  auto plans = channel_plans;
  std::stable_sort(plans.begin(), plans.end(), [](const auto& a, const auto& b) {
    const int sa = a[0] + a[1] + a[2], sb = b[0] + b[1] + b[2];
    return sa != sb ? sa < sb : a < b;
  });
  auto rates = lr0;
  std::sort(rates.begin(), rates.end());
  auto strat = strategies;
  std::stable_sort(strat.begin(), strat.end());
  auto ep = epochs;
  std::sort(ep.begin(), ep.end());
  auto pen = l2;
  std::sort(pen.begin(), pen.end());
  auto ks = kernel_sizes;
  std::sort(ks.begin(), ks.end());

  std::vector<nn::TrainingConfig> out;
  for (const auto& plan : plans)
    for (double lr : rates)
      for (Strategy s : strat)
        for (int e : ep)
          for (double l : pen)
            for (int k : ks) {
              nn::TrainingConfig cfg;
              cfg.strategy = s;
              cfg.lr0 = lr;
              cfg.epochs = e;
              cfg.l2 = l;
              cfg.kernel_size = k;
              cfg.channel_plan = plan;
              cfg.batch_size = batch_size;
              cfg.early_stop_patience = early_stop_patience;
              cfg.seed = seed;
              out.push_back(cfg);
            }
  return out;
}

HyperGrid singleton_grid(const nn::TrainingConfig& cfg) {
  HyperGrid g;
  g.channel_plans = {cfg.channel_plan};
  g.lr0 = {cfg.lr0};
  g.epochs = {cfg.epochs};
  g.l2 = {cfg.l2};
  g.kernel_sizes = {cfg.kernel_size};
  g.strategies = {cfg.strategy};
  g.batch_size = cfg.batch_size;
  g.early_stop_patience = cfg.early_stop_patience;
  g.seed = cfg.seed;
  return g;
}

namespace {

sigproc::WindowedExample prepared(ComponentId c, const Series& noisy, const Series& reference,
                                  double scale, Strategy strategy, const std::string& id,
                                  std::size_t offset) {
  const Series n = normalize(noisy, scale);
  return {c, n, make_targets(n, normalize(reference, scale), strategy), id, offset};
}

}  // namespace

ComponentExamples component_examples(const ImpactDataset& dataset, ComponentId c, double scale,
                                     Strategy strategy) {
  const auto window = static_cast<std::ptrdiff_t>(sigproc::kWindow);
  const auto sliding = [&](Split split, std::vector<sigproc::WindowedExample>& out) {
    for (const auto* r : dataset.records_in(split)) {
      if (!r->reference) {
        throw std::invalid_argument(fmt::format("{} record without reference: {}", split_name(split), r->impact_id));
      }
      const std::size_t count = sigproc::window_count(r->noisy.size());
      const auto& n = r->noisy.channel(c);
      const auto& ref = r->reference->channel(c);
      for (std::size_t k = 0; k < count; ++k) {
        const auto off = static_cast<std::ptrdiff_t>(k * sigproc::kStride);
        out.push_back(prepared(c, Series(n.begin() + off, n.begin() + off + window),
                               Series(ref.begin() + off, ref.begin() + off + window), scale, strategy,
                               r->impact_id, k * sigproc::kStride));
      }
    }
  };
  ComponentExamples ex;
  sliding(Split::Train, ex.train);
  sliding(Split::Val, ex.val);
  return ex;
}

FitResult fit_suite(const ImpactDataset& dataset, const HyperGrid& grid, int threads) {
  grid.validate();
  if (dataset.count(Split::Train) == 0) throw std::invalid_argument("fit_suite: empty training split");
  if (dataset.count(Split::Val) == 0) throw std::invalid_argument("fit_suite: empty validation split");

  const auto points = grid.points();
  const auto train_records = dataset.records_in(Split::Train);
  std::array<double, kNumTrainable> scales{};
  for (ComponentId c : kTrainableComponents) {
    scales[static_cast<std::size_t>(index_of(c))] = component_scale(train_records, c);
  }

  struct Slot {
    nn::TrainResult result;
  };
  const std::size_t tasks = points.size() * kNumTrainable;
  std::vector<Slot> slots(tasks);
  parallel_for(
      tasks,
      [&](std::size_t task) {
        const std::size_t ci = task / points.size();
        const ComponentId c = kTrainableComponents[ci];
        nn::TrainingConfig cfg = points[task % points.size()];
        cfg.seed = splitmix64(grid.seed + ci);
        const ComponentExamples ex = component_examples(dataset, c, scales[ci], cfg.strategy);
        slots[task].result = nn::train(ex.train, ex.val, cfg);
      },
      threads);

  FitResult fit;
  for (std::size_t ci = 0; ci < kNumTrainable; ++ci) {
    ComponentReport rep;
    rep.component = kTrainableComponents[ci];
    rep.scale = scales[ci];
    for (std::size_t p = 0; p < points.size(); ++p) {
      const auto& r = slots[ci * points.size() + p].result;
      GridPointReport gp;
      gp.config = points[p];
      gp.config.seed = splitmix64(grid.seed + ci);
      gp.val_rmse = r.best_val_rmse * scales[ci];
      gp.best_epoch = r.best_epoch;
      gp.epochs_run = static_cast<int>(r.history.size());
      gp.stopped_early = r.stopped_early;
      gp.history = r.history;
      rep.grid.push_back(std::move(gp));
      if (rep.grid.back().val_rmse < rep.grid[rep.selected].val_rmse) rep.selected = p;
    }
    const auto& best = slots[ci * points.size() + rep.selected].result;
    fit.suite.set(ComponentModel{rep.component, points[rep.selected].strategy, rep.scale, best.network});
    fit.reports.push_back(std::move(rep));
  }
  return fit;
}

std::vector<std::size_t> frame_offsets(std::size_t length, std::size_t window) {
  if (length < window) {
    throw std::invalid_argument(
        fmt::format("trace of {} samples is shorter than the {}-sample frame", length, window));
  }
  std::vector<std::size_t> out;
  for (std::size_t off = 0; off + window <= length; off += window) out.push_back(off);
  if (out.back() + window < length) out.push_back(length - window);
  return out;
}

KinematicsTrace denoise_trace(const DenoiserSuite& suite, const KinematicsTrace& trace) {
  if (!suite.complete()) throw std::invalid_argument("denoise_trace: suite is incomplete");
  const std::size_t window = sigproc::kWindow;
  const auto offsets = frame_offsets(trace.size(), window);
  const auto w = static_cast<Eigen::Index>(window);

  KinematicsTrace::Channels out;
  for (ComponentId c : kTrainableComponents) {
    const ComponentModel& m = suite.model(c);
    if (static_cast<std::size_t>(m.network.window) != window) {
      throw std::invalid_argument("model window does not match the frame length");
    }
    const auto& x = trace.channel(c);
    nn::Matrix frames(1, static_cast<Eigen::Index>(offsets.size()) * w);
    for (std::size_t f = 0; f < offsets.size(); ++f) {
      for (std::size_t i = 0; i < window; ++i) {
        frames(0, static_cast<Eigen::Index>(f) * w + static_cast<Eigen::Index>(i)) =
            x[offsets[f] + i] / m.scale;
      }
    }
    const nn::Matrix pred = nn::network_forward(m.network, frames);

    Series& y = out[static_cast<std::size_t>(index_of(c))];
    y.assign(x.size(), 0.0);
    for (std::size_t f = 0; f < offsets.size(); ++f) {
      for (std::size_t i = 0; i < window; ++i) {
        const double p = pred(0, static_cast<Eigen::Index>(f) * w + static_cast<Eigen::Index>(i));
        const std::size_t t = offsets[f] + i;
        y[t] = m.strategy == Strategy::Direct ? p * m.scale : x[t] + p * m.scale;
      }
    }
  }
  return KinematicsTrace(std::move(out), trace.sample_rate_hz(), trace.t0_s());
}

}  // namespace impact::denoise
