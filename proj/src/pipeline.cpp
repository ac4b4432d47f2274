#include "impact/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "impact/sigproc.hpp"

namespace impact::pipeline {

namespace {

// Non-finite values have no JSON representation; they are written as null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json num_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Json opt_num(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

void check_keys(const Json& j, const std::string& section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw std::invalid_argument(fmt::format("config: '{}' must be an object", section));
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      throw std::invalid_argument(fmt::format("config: unknown key '{}' in '{}'", key, section));
    }
  }
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

Json training_config_json(const nn::TrainingConfig& c) {
  return {{"strategy", nn::strategy_name(c.strategy)},
          {"lr0", c.lr0},
          {"epochs", c.epochs},
          {"l2", c.l2},
          {"kernel_size", c.kernel_size},
          {"channel_plan", c.channel_plan},
          {"batch_size", c.batch_size},
          {"lr_decay", c.lr_decay},
          {"lr_decay_every", c.lr_decay_every},
          {"early_stop_patience", c.early_stop_patience},
          {"seed", c.seed}};
}

Json component_errors_json(const stats::ComponentErrors& e) {
  return {{"mae", num(e.mae)},
          {"rmse", num(e.rmse)},
          {"snr_db", num(e.snr_db)},
          {"mean_pae", num(e.peaks.mean_pae)},
          {"peak_rmse", num(e.peaks.peak_rmse)},
          {"peak_r2", opt_num(e.peaks.peak_r2)},
          {"peak_pearson", opt_num(e.peaks.pearson)},
          {"peak_spearman", opt_num(e.peaks.spearman)},
          {"per_impact",
           {{"mae", num_array(e.mae_per_impact)},
            {"rmse", num_array(e.rmse_per_impact)},
            {"pae", num_array(e.peaks.pae)},
            {"snr_db", num_array(e.snr_per_impact)}}}};
}

Json wilcoxon_json(const stats::WilcoxonResult& w) {
  return {{"alternative", stats::alternative_name(w.alternative)},
          {"method", w.method == stats::WilcoxonMethod::Exact ? "exact" : "normal_approx"},
          {"n_effective", w.n_effective},
          {"w_statistic", w.w_statistic},
          {"w_plus", w.w_plus},
          {"w_minus", w.w_minus},
          {"p_value", num(w.p_value)}};
}

const stats::ComponentErrors& errors_for(const std::vector<stats::ComponentErrors>& all, ComponentId c) {
  for (const auto& e : all) {
    if (e.component == c) return e;
  }
  throw std::logic_error("component missing from error report");
}

double reduction(double before, double after) { return before > 0.0 ? 1.0 - after / before : 0.0; }

using MetricGetter = double (*)(const bic::InjuryMetrics&);
constexpr std::array<std::pair<const char*, MetricGetter>, 6> kBicFields = {{
    {"hic15", [](const bic::InjuryMetrics& m) { return m.hic15; }},
    {"hip_w", [](const bic::InjuryMetrics& m) { return m.hip_w; }},
    {"gambit", [](const bic::InjuryMetrics& m) { return m.gambit; }},
    {"si", [](const bic::InjuryMetrics& m) { return m.si; }},
    {"bric", [](const bic::InjuryMetrics& m) { return m.bric; }},
    {"cp", [](const bic::InjuryMetrics& m) { return m.cp; }},
}};

}  // namespace

void PreprocessConfig::validate() const {
  if (filter_order < 1 || filter_order > 12) throw std::invalid_argument("preprocess: filter_order must be in [1, 12]");
  if (!(cutoff_hz > 0.0)) throw std::invalid_argument("preprocess: cutoff_hz must be positive");
  if (max_shift_samples < 0) throw std::invalid_argument("preprocess: max_shift_samples must be >= 0");
}

PreprocessResult preprocess(const ImpactDataset& dataset, const PreprocessConfig& cfg) {
  cfg.validate();
  PreprocessResult out;
  std::vector<ImpactRecord> full, windows;
  std::map<std::string, Split> split;
  for (const auto& rec : dataset.records()) {
    const std::size_t len = rec.noisy.size();
    const auto filter = sigproc::design_butterworth(cfg.filter_order, cfg.cutoff_hz, rec.noisy.sample_rate_hz());
    if (len < sigproc::kWindow) {
      out.warnings.push_back(fmt::format("{}: {} samples is shorter than the {}-sample window, skipped",
                                         rec.impact_id, len, sigproc::kWindow));
      continue;
    }
    if (len <= sigproc::filtfilt_padding(filter)) {
      out.warnings.push_back(fmt::format("{}: {} samples is too short for filter padding {}, skipped",
                                         rec.impact_id, len, sigproc::filtfilt_padding(filter)));
      continue;
    }
    if (rec.reference && 2 * static_cast<std::size_t>(cfg.max_shift_samples) >= len) {
      out.warnings.push_back(fmt::format("{}: {} samples is too short for a {}-sample alignment search, skipped",
                                         rec.impact_id, len, cfg.max_shift_samples));
      continue;
    }

    ShiftRecord shift;
    shift.impact_id = rec.impact_id;
    shift.has_reference = rec.reference.has_value();
    ImpactRecord f{rec.impact_id, sigproc::filtfilt(filter, rec.noisy), std::nullopt, rec.metadata};
    if (rec.reference) {
      auto aligned = sigproc::align_by_xcorr(f.noisy, sigproc::filtfilt(filter, *rec.reference),
                                             cfg.max_shift_samples);
      shift.shift = aligned.shift;
      shift.correlation = aligned.correlation;
      shift.degenerate = aligned.degenerate;
      f.noisy = std::move(aligned.noisy);
      f.reference = std::move(aligned.reference);
    }
    const std::size_t offset = sigproc::evaluation_offset(f.reference ? *f.reference : f.noisy);
    ImpactRecord w{rec.impact_id, f.noisy.slice(offset, sigproc::kWindow),
                   f.reference ? std::optional(f.reference->slice(offset, sigproc::kWindow)) : std::nullopt,
                   rec.metadata};
    split[rec.impact_id] = dataset.split_of(rec.impact_id);
    out.shifts.push_back(shift);
    full.push_back(std::move(f));
    windows.push_back(std::move(w));
  }
  out.full = ImpactDataset(std::move(full), split, dataset.rng_seed());
  out.windows = ImpactDataset(std::move(windows), split, dataset.rng_seed());
  return out;
}

Json shift_report_json(const PreprocessResult& result) {
  Json shifts = Json::array();
  for (const auto& s : result.shifts) {
    shifts.push_back({{"impact_id", s.impact_id},
                      {"has_reference", s.has_reference},
                      {"shift_samples", s.shift},
                      {"correlation", num(s.correlation)},
                      {"degenerate", s.degenerate}});
  }
  return {{"format_version", kFormatVersion},
          {"shift_convention", "aligned_noisy[i] = noisy[i + shift_samples]"},
          {"shifts", shifts},
          {"warnings", result.warnings}};
}

Evaluation evaluate(const std::vector<std::string>& ids, const std::vector<KinematicsTrace>& original,
                    const std::vector<KinematicsTrace>& denoised,
                    const std::vector<KinematicsTrace>& reference) {
  if (ids.size() != original.size() || ids.size() != denoised.size() || ids.size() != reference.size()) {
    throw std::invalid_argument("evaluate: ids and trace lists differ in size");
  }
  Evaluation ev;
  ev.impact_ids = ids;
  ev.original = stats::error_report(original, reference);
  ev.denoised = stats::error_report(denoised, reference);

  for (ComponentId c : kEvaluationComponents) {
    const auto& o = errors_for(ev.original, c);
    const auto& d = errors_for(ev.denoised, c);
    const std::array<std::tuple<const char*, const std::vector<double>*, const std::vector<double>*>, 3> metrics = {{
        {"rmse", &o.rmse_per_impact, &d.rmse_per_impact},
        {"mae", &o.mae_per_impact, &d.mae_per_impact},
        {"pae", &o.peaks.pae, &d.peaks.pae},
    }};
    for (const auto& [name, a, b] : metrics) {
      PairedTest t;
      t.component = c;
      t.metric = name;
      try {
        t.two_sided = stats::wilcoxon_signed_rank(*a, *b, stats::Alternative::TwoSided);
        t.greater = stats::wilcoxon_signed_rank(*a, *b, stats::Alternative::Greater);
      } catch (const std::invalid_argument& e) {
        t.note = e.what();
      }
      ev.tests.push_back(std::move(t));
    }
  }

  for (std::size_t i = 0; i < ids.size(); ++i) {
    ev.bic.reference.push_back(bic::compute_all(reference[i]));
    ev.bic.original.push_back(bic::compute_all(original[i]));
    ev.bic.denoised.push_back(bic::compute_all(denoised[i]));
  }

  double snr_in = 0, snr_out = 0, red = 0;
  for (ComponentId c : kTrainableComponents) {
    const auto& o = errors_for(ev.original, c);
    const auto& d = errors_for(ev.denoised, c);
    snr_in += o.snr_db;
    snr_out += d.snr_db;
    red += reduction(o.rmse, d.rmse);
  }
  ev.summary = {snr_in / kNumTrainable, snr_out / kNumTrainable, red / kNumTrainable};
  return ev;
}

Evaluation evaluate_split(const denoise::DenoiserSuite& suite, const ImpactDataset& windows, Split split) {
  std::vector<std::string> ids;
  std::vector<KinematicsTrace> original, denoised, reference;
  std::set<std::string> notes;
  for (const ImpactRecord* rec : windows.records_in(split)) {
    if (!rec->reference) continue;
    ids.push_back(rec->impact_id);
    original.push_back(rec->noisy);
    denoised.push_back(denoise::denoise_trace(suite, rec->noisy));
    reference.push_back(*rec->reference);
    if (auto it = rec->metadata.find("source"); it != rec->metadata.end()) notes.insert(it->second);
  }
  Evaluation ev = evaluate(ids, original, denoised, reference);
  ev.notes.assign(notes.begin(), notes.end());
  return ev;
}

Json injury_metrics_json(const bic::InjuryMetrics& m) {
  Json j = Json::object();
  for (const auto& [name, get] : kBicFields) j[name] = num(get(m));
  return j;
}

Json evaluation_json(const Evaluation& ev, const std::vector<ComponentId>& components) {
  Json comps = Json::array();
  for (ComponentId c : components) {
    const auto& o = errors_for(ev.original, c);
    const auto& d = errors_for(ev.denoised, c);
    comps.push_back({{"component", component_name(c)},
                     {"original", component_errors_json(o)},
                     {"denoised", component_errors_json(d)},
                     {"rmse_reduction", num(reduction(o.rmse, d.rmse))},
                     {"mae_reduction", num(reduction(o.mae, d.mae))}});
  }

  Json tests = Json::array();
  for (const auto& t : ev.tests) {
    if (std::find(components.begin(), components.end(), t.component) == components.end()) continue;
    Json entry = {{"component", component_name(t.component)}, {"metric", t.metric}};
    entry["two_sided"] = t.two_sided ? wilcoxon_json(*t.two_sided) : Json(nullptr);
    entry["original_greater"] = t.greater ? wilcoxon_json(*t.greater) : Json(nullptr);
    if (!t.note.empty()) entry["note"] = t.note;
    tests.push_back(std::move(entry));
  }

  Json bic_summary = Json::array();
  for (const auto& [name, get] : kBicFields) {
    std::vector<double> ref, orig, den, err_o, err_d;
    for (std::size_t i = 0; i < ev.impact_ids.size(); ++i) {
      ref.push_back(get(ev.bic.reference[i]));
      orig.push_back(get(ev.bic.original[i]));
      den.push_back(get(ev.bic.denoised[i]));
      err_o.push_back(std::abs(orig.back() - ref.back()));
      err_d.push_back(std::abs(den.back() - ref.back()));
    }
    bic_summary.push_back({{"metric", name},
                           {"mean_abs_error_original", num(mean_of(err_o))},
                           {"mean_abs_error_denoised", num(mean_of(err_d))},
                           {"reference", num_array(ref)},
                           {"original", num_array(orig)},
                           {"denoised", num_array(den)}});
  }

  return {{"format_version", kFormatVersion},
          {"n_impacts", ev.impact_ids.size()},
          {"impact_ids", ev.impact_ids},
          {"notes", ev.notes},
          {"summary",
           {{"mean_snr_in_db", num(ev.summary.mean_snr_in_db)},
            {"mean_snr_out_db", num(ev.summary.mean_snr_out_db)},
            {"mean_rmse_reduction", num(ev.summary.mean_rmse_reduction)}}},
          {"components", comps},
          {"wilcoxon", tests},
          {"injury_metrics", bic_summary}};
}

std::vector<FilterGridRow> compare_filters(const std::vector<KinematicsTrace>& noisy,
                                           const std::vector<KinematicsTrace>& reference,
                                           const std::vector<int>& orders,
                                           const std::vector<double>& cutoffs_hz) {
  if (noisy.empty()) throw std::invalid_argument("compare_filters: no traces");
  std::vector<FilterGridRow> rows;
  for (int order : orders) {
    for (double fc : cutoffs_hz) {
      std::vector<KinematicsTrace> filtered;
      filtered.reserve(noisy.size());
      for (const auto& t : noisy) {
        filtered.push_back(sigproc::filtfilt(sigproc::design_butterworth(order, fc, t.sample_rate_hz()), t));
      }
      rows.push_back({order, fc, stats::error_report(filtered, reference)});
    }
  }
  return rows;
}

Json filter_comparison_json(const std::vector<FilterGridRow>& grid, const FilterGridRow& suite_row) {
  const auto row_json = [](const FilterGridRow& r) {
    Json comps = Json::array();
    double rmse6 = 0;
    for (const auto& e : r.errors) {
      comps.push_back({{"component", component_name(e.component)},
                       {"mae", num(e.mae)},
                       {"rmse", num(e.rmse)},
                       {"mean_pae", num(e.peaks.mean_pae)},
                       {"peak_rmse", num(e.peaks.peak_rmse)},
                       {"snr_db", num(e.snr_db)}});
      if (is_trainable(e.component)) rmse6 += e.rmse / kNumTrainable;
    }
    return std::pair{Json{{"components", comps}, {"mean_rmse_trainable", num(rmse6)}}, rmse6};
  };

  Json rows = Json::array();
  std::optional<std::pair<std::size_t, double>> best;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto [j, rmse6] = row_json(grid[i]);
    Json row = {{"order", grid[i].order}, {"cutoff_hz", grid[i].cutoff_hz}};
    row.update(j);
    rows.push_back(std::move(row));
    if (!best || rmse6 < best->second) best = {i, rmse6};
  }
  Json out = {{"format_version", kFormatVersion}, {"grid", rows}, {"suite", row_json(suite_row).first}};
  if (best) {
    out["best_filter"] = {{"order", grid[best->first].order},
                          {"cutoff_hz", grid[best->first].cutoff_hz},
                          {"mean_rmse_trainable", num(best->second)}};
  }
  return out;
}

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    const std::string tok = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size() || !std::isfinite(v)) {
      throw std::invalid_argument(fmt::format("bad range '{}'", text));
    }
    parts.push_back(v);
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() > 3) throw std::invalid_argument(fmt::format("bad range '{}'", text));
  if (parts.size() == 1) return parts;
  const double lo = parts[0], hi = parts[1], step = parts.size() == 3 ? parts[2] : 1.0;
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument(fmt::format("bad range '{}'", text));
  std::vector<double> out;
  for (long i = 0;; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    if (v > hi + 1e-9 * step) break;
    if (out.size() >= 10000) throw std::invalid_argument(fmt::format("range '{}' is too long", text));
    out.push_back(v);
  }
  return out;
}

Json fit_report_json(const denoise::FitResult& fit) {
  Json comps = Json::array();
  for (const auto& r : fit.reports) {
    Json grid = Json::array();
    for (const auto& g : r.grid) {
      std::vector<double> lr, loss, val;
      for (const auto& e : g.history) {
        lr.push_back(e.learning_rate);
        loss.push_back(e.train_loss);
        val.push_back(e.val_rmse);
      }
      grid.push_back({{"config", training_config_json(g.config)},
                      {"val_rmse", num(g.val_rmse)},
                      {"best_epoch", g.best_epoch},
                      {"epochs_run", g.epochs_run},
                      {"stopped_early", g.stopped_early},
                      {"history",
                       {{"learning_rate", num_array(lr)},
                        {"train_loss", num_array(loss)},
                        {"val_rmse_normalized", num_array(val)}}}});
    }
    comps.push_back({{"component", component_name(r.component)},
                     {"scale", num(r.scale)},
                     {"selected", r.selected},
                     {"selected_config", training_config_json(r.grid.at(r.selected).config)},
                     {"selected_val_rmse", num(r.grid.at(r.selected).val_rmse)},
                     {"grid", grid}});
  }
  return {{"format_version", kFormatVersion}, {"components", comps}};
}

synth::SynthConfig synth_config_from_json(const Json& j) {
  check_keys(j, "synth",
             {"n_impacts", "trace_len", "min_pulses", "max_pulses", "lin_acc_min_g", "lin_acc_max_g",
              "ang_vel_min_rads", "ang_vel_max_rads", "pulse_min_ms", "pulse_max_ms", "gain_drift_max",
              "ringing_freq_min_hz", "ringing_freq_max_hz", "ringing_amp_max", "ringing_decay_min_ms",
              "ringing_decay_max_ms", "white_noise_frac", "time_shift_max", "baseline_drift_frac", "seed"});
  synth::SynthConfig c;
  read(j, "n_impacts", c.n_impacts);
  read(j, "trace_len", c.trace_len);
  read(j, "min_pulses", c.min_pulses);
  read(j, "max_pulses", c.max_pulses);
  read(j, "lin_acc_min_g", c.lin_acc_min_g);
  read(j, "lin_acc_max_g", c.lin_acc_max_g);
  read(j, "ang_vel_min_rads", c.ang_vel_min_rads);
  read(j, "ang_vel_max_rads", c.ang_vel_max_rads);
  read(j, "pulse_min_ms", c.pulse_min_ms);
  read(j, "pulse_max_ms", c.pulse_max_ms);
  read(j, "gain_drift_max", c.gain_drift_max);
  read(j, "ringing_freq_min_hz", c.ringing_freq_min_hz);
  read(j, "ringing_freq_max_hz", c.ringing_freq_max_hz);
  read(j, "ringing_amp_max", c.ringing_amp_max);
  read(j, "ringing_decay_min_ms", c.ringing_decay_min_ms);
  read(j, "ringing_decay_max_ms", c.ringing_decay_max_ms);
  read(j, "white_noise_frac", c.white_noise_frac);
  read(j, "time_shift_max", c.time_shift_max);
  read(j, "baseline_drift_frac", c.baseline_drift_frac);
  read(j, "seed", c.seed);
  c.validate();
  return c;
}

Json synth_config_to_json(const synth::SynthConfig& c) {
  return {{"n_impacts", c.n_impacts},
          {"trace_len", c.trace_len},
          {"min_pulses", c.min_pulses},
          {"max_pulses", c.max_pulses},
          {"lin_acc_min_g", c.lin_acc_min_g},
          {"lin_acc_max_g", c.lin_acc_max_g},
          {"ang_vel_min_rads", c.ang_vel_min_rads},
          {"ang_vel_max_rads", c.ang_vel_max_rads},
          {"pulse_min_ms", c.pulse_min_ms},
          {"pulse_max_ms", c.pulse_max_ms},
          {"gain_drift_max", c.gain_drift_max},
          {"ringing_freq_min_hz", c.ringing_freq_min_hz},
          {"ringing_freq_max_hz", c.ringing_freq_max_hz},
          {"ringing_amp_max", c.ringing_amp_max},
          {"ringing_decay_min_ms", c.ringing_decay_min_ms},
          {"ringing_decay_max_ms", c.ringing_decay_max_ms},
          {"white_noise_frac", c.white_noise_frac},
          {"time_shift_max", c.time_shift_max},
          {"baseline_drift_frac", c.baseline_drift_frac},
          {"seed", c.seed}};
}

PreprocessConfig preprocess_config_from_json(const Json& j) {
  check_keys(j, "preprocess", {"filter_order", "cutoff_hz", "max_shift_samples"});
  PreprocessConfig c;
  read(j, "filter_order", c.filter_order);
  read(j, "cutoff_hz", c.cutoff_hz);
  read(j, "max_shift_samples", c.max_shift_samples);
  c.validate();
  return c;
}

nn::TrainingConfig training_config_from_json(const Json& j) {
  check_keys(j, "single",
             {"strategy", "lr0", "epochs", "l2", "kernel_size", "channel_plan", "batch_size", "lr_decay",
              "lr_decay_every", "early_stop_patience", "seed"});
  nn::TrainingConfig c;
  if (j.contains("strategy")) c.strategy = nn::strategy_from_name(j.at("strategy").get<std::string>());
  read(j, "lr0", c.lr0);
  read(j, "epochs", c.epochs);
  read(j, "l2", c.l2);
  read(j, "kernel_size", c.kernel_size);
  read(j, "channel_plan", c.channel_plan);
  read(j, "batch_size", c.batch_size);
  read(j, "lr_decay", c.lr_decay);
  read(j, "lr_decay_every", c.lr_decay_every);
  read(j, "early_stop_patience", c.early_stop_patience);
  read(j, "seed", c.seed);
  c.validate();
  return c;
}

denoise::HyperGrid hyper_grid_from_json(const Json& j) {
  check_keys(j, "grid",
             {"format_version", "channel_plans", "lr0", "epochs", "l2", "kernel_sizes", "strategies",
              "batch_size", "early_stop_patience", "seed"});
  if (j.contains("format_version") && j.at("format_version").get<int>() != kFormatVersion) {
    throw std::invalid_argument("grid: unsupported format_version");
  }
  denoise::HyperGrid g;
  read(j, "channel_plans", g.channel_plans);
  read(j, "lr0", g.lr0);
  read(j, "epochs", g.epochs);
  read(j, "l2", g.l2);
  read(j, "kernel_sizes", g.kernel_sizes);
  if (j.contains("strategies")) {
    g.strategies.clear();
    for (const auto& s : j.at("strategies")) g.strategies.push_back(nn::strategy_from_name(s.get<std::string>()));
  }
  read(j, "batch_size", g.batch_size);
  read(j, "early_stop_patience", g.early_stop_patience);
  read(j, "seed", g.seed);
  g.validate();
  return g;
}

RunConfig run_config_from_json(const Json& j) {
  check_keys(j, "run config", {"format_version", "synth", "preprocess", "train", "eval", "paths"});
  if (!j.contains("format_version")) throw std::invalid_argument("config: format_version is required");
  if (j.at("format_version").get<int>() != kFormatVersion) {
    throw std::invalid_argument(fmt::format("config: unsupported format_version {}", j.at("format_version").dump()));
  }
  RunConfig rc;
  if (j.contains("synth")) rc.synth = synth_config_from_json(j.at("synth"));
  if (j.contains("preprocess")) rc.preprocess = preprocess_config_from_json(j.at("preprocess"));
  if (j.contains("train")) {
    const Json& t = j.at("train");
    check_keys(t, "train", {"grid", "single"});
    if (t.contains("grid") == t.contains("single")) {
      throw std::invalid_argument("config: 'train' needs exactly one of 'grid' or 'single'");
    }
    rc.grid = t.contains("grid") ? hyper_grid_from_json(t.at("grid"))
                                 : denoise::singleton_grid(training_config_from_json(t.at("single")));
  }
  if (j.contains("eval")) {
    const Json& e = j.at("eval");
    check_keys(e, "eval", {"components"});
    if (e.contains("components")) {
      rc.eval_components.clear();
      for (const auto& name : e.at("components")) {
        rc.eval_components.push_back(component_from_name(name.get<std::string>()));
      }
    }
  }
  if (j.contains("paths")) {
    const Json& p = j.at("paths");
    if (!p.is_object()) throw std::invalid_argument("config: 'paths' must be an object");
    for (const auto& [key, value] : p.items()) rc.paths[key] = value.get<std::string>();
  }
  return rc;
}

std::string config_hash(const Json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace impact::pipeline
