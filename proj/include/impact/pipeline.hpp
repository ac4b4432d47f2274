#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "impact/core_types.hpp"
#include "impact/denoiser.hpp"
#include "impact/eval_stats.hpp"
#include "impact/injury_metrics.hpp"
#include "impact/synth_data.hpp"
#include "json.hpp"

namespace impact::pipeline {

using Json = nlohmann::ordered_json;

struct PreprocessConfig {
  int filter_order = 5;
  double cutoff_hz = 160.0;
  int max_shift_samples = 10;

  void validate() const;
};

struct ShiftRecord {
  std::string impact_id;
  bool has_reference = false;
  int shift = 0;
  double correlation = 0;
  bool degenerate = false;
};

struct PreprocessResult {
  ImpactDataset full;     ///< filtered and aligned, full length (training input)
  ImpactDataset windows;  ///< 100-sample evaluation windows, peak at sample 20
  std::vector<ShiftRecord> shifts;
  std::vector<std::string> warnings;  ///< one line per skipped impact
};

/// Low-pass both traces with filtfilt, align the noisy trace to the reference
/// and cut the peak-anchored evaluation window. Impacts shorter than the
/// window (or than the filter padding) are skipped with a warning; the
/// remaining impacts keep their original split.
PreprocessResult preprocess(const ImpactDataset& dataset, const PreprocessConfig& cfg);

Json shift_report_json(const PreprocessResult& result);

/// One paired comparison of per-impact errors, original vs denoised.
struct PairedTest {
  ComponentId component = ComponentId::LinAccX;
  std::string metric;  ///< "rmse", "mae" or "pae"
  std::optional<stats::WilcoxonResult> two_sided;
  std::optional<stats::WilcoxonResult> greater;  ///< original error > denoised error
  std::string note;                              ///< why the test was not run
};

struct BicComparison {
  std::vector<bic::InjuryMetrics> reference;
  std::vector<bic::InjuryMetrics> original;
  std::vector<bic::InjuryMetrics> denoised;
};

struct BenchmarkSummary {
  double mean_snr_in_db = 0;   ///< over the six trainable components
  double mean_snr_out_db = 0;
  double mean_rmse_reduction = 0;  ///< mean over the six of 1 - rmse_out / rmse_in
};

struct Evaluation {
  std::vector<std::string> impact_ids;
  std::vector<stats::ComponentErrors> original;  ///< noisy vs reference
  std::vector<stats::ComponentErrors> denoised;  ///< prediction vs reference
  std::vector<PairedTest> tests;
  BicComparison bic;
  BenchmarkSummary summary;
  std::vector<std::string> notes;  ///< e.g. provenance of the reference data
};

/// Errors of the original and the denoised traces against the references, a
/// Wilcoxon test per component and metric, and the injury criteria of all
/// three. Needs at least 3 impacts.
Evaluation evaluate(const std::vector<std::string>& ids, const std::vector<KinematicsTrace>& original,
                    const std::vector<KinematicsTrace>& denoised,
                    const std::vector<KinematicsTrace>& reference);

/// Denoises every record of `split` in a dataset of evaluation windows and
/// evaluates the result.
Evaluation evaluate_split(const denoise::DenoiserSuite& suite, const ImpactDataset& windows,
                          Split split);

Json evaluation_json(const Evaluation& ev, const std::vector<ComponentId>& components);

Json injury_metrics_json(const bic::InjuryMetrics& m);

/// Component errors for Butterworth-only denoising at one grid point, or for
/// the suite when order == 0.
struct FilterGridRow {
  int order = 0;
  double cutoff_hz = 0;
  std::vector<stats::ComponentErrors> errors;
};

std::vector<FilterGridRow> compare_filters(const std::vector<KinematicsTrace>& noisy,
                                           const std::vector<KinematicsTrace>& reference,
                                           const std::vector<int>& orders,
                                           const std::vector<double>& cutoffs_hz);

Json filter_comparison_json(const std::vector<FilterGridRow>& grid, const FilterGridRow& suite_row);

/// "5:9" -> {5,6,7,8,9}; "20:160:20" -> {20,40,...,160}; "7" -> {7}.
std::vector<double> parse_range(const std::string& text);

Json fit_report_json(const denoise::FitResult& fit);

// Configuration documents. Every section rejects unknown keys.

synth::SynthConfig synth_config_from_json(const Json& j);
Json synth_config_to_json(const synth::SynthConfig& cfg);
PreprocessConfig preprocess_config_from_json(const Json& j);
nn::TrainingConfig training_config_from_json(const Json& j);
denoise::HyperGrid hyper_grid_from_json(const Json& j);

struct RunConfig {
  synth::SynthConfig synth;
  PreprocessConfig preprocess;
  denoise::HyperGrid grid;
  std::vector<ComponentId> eval_components{kEvaluationComponents.begin(), kEvaluationComponents.end()};
  std::map<std::string, std::string> paths;
};

inline constexpr int kFormatVersion = 1;

/// Top-level run configuration. format_version is required; the sections
/// synth, preprocess, train ({"grid": ...} or {"single": ...}), eval and paths
/// are optional and default when absent.
RunConfig run_config_from_json(const Json& j);

/// FNV-1a of the compact serialization, as 16 hex digits.
std::string config_hash(const Json& j);

}  // namespace impact::pipeline
