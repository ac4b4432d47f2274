// impact-denoise: synthetic data, preprocessing, training, denoising and
// evaluation of mouthguard head kinematics.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>

#include "impact/denoiser.hpp"
#include "impact/eval_stats.hpp"
#include "impact/injury_metrics.hpp"
#include "impact/pipeline.hpp"
#include "impact/synth_data.hpp"
#include "impact/trace_io.hpp"

namespace fs = std::filesystem;
using namespace impact;
using pipeline::Json;

namespace {

Json load_json(const fs::path& path) {
  try {
    return Json::parse(io::read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

pipeline::RunConfig load_run_config(const std::string& path) {
  if (path.empty()) return {};
  try {
    return pipeline::run_config_from_json(load_json(path));
  } catch (const std::runtime_error&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(fmt::format("{}: {}", path, e.what()));
  }
}

void write_json(const fs::path& path, const Json& j) { io::write_text_file(path, j.dump(2) + "\n"); }

void require_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("output directory does not exist: " + dir.string());
}

std::vector<const ImpactRecord*> select(const ImpactDataset& ds, const std::string& split) {
  if (split == "all") {
    std::vector<const ImpactRecord*> out;
    for (const auto& r : ds.records()) out.push_back(&r);
    return out;
  }
  return ds.records_in(split_from_name(split));
}

std::vector<int> parse_int_range(const std::string& text) {
  std::vector<int> out;
  for (double v : pipeline::parse_range(text)) {
    if (v != std::floor(v)) throw std::invalid_argument(fmt::format("range '{}' must be integral", text));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

int cmd_synth(const std::string& config, const fs::path& out) {
  const auto rc = load_run_config(config);
  require_dir(out);
  const auto ds = synth::generate(rc.synth);
  io::write_dataset(ds, out);
  const Json cfg = pipeline::synth_config_to_json(rc.synth);
  write_json(out / "provenance.json",
             {{"format_version", pipeline::kFormatVersion},
              {"command", "synth"},
              {"seed", rc.synth.seed},
              {"config_hash", pipeline::config_hash(cfg)},
              {"config", cfg},
              {"noise_model", "assumed: gain drift, onset-triggered ringing, white noise, trigger delay, "
                              "baseline drift; not a measured mouthguard noise signature"}});
  fmt::print("wrote {} impacts to {}\n", ds.records().size(), out.string());
  return 0;
}

int cmd_preprocess(const fs::path& in, const fs::path& out, const std::string& config) {
  const auto rc = load_run_config(config);
  require_dir(out);
  const auto result = pipeline::preprocess(io::read_dataset(in), rc.preprocess);
  for (const auto& w : result.warnings) fmt::print(stderr, "warning: {}\n", w);
  io::write_dataset(result.windows, out);
  fs::create_directories(out / "full");
  io::write_dataset(result.full, out / "full");
  write_json(out / "shifts.json", pipeline::shift_report_json(result));
  fmt::print("preprocessed {} impacts ({} skipped) into {}\n", result.shifts.size(), result.warnings.size(),
             out.string());
  return 0;
}

int cmd_train(const fs::path& in, const std::string& grid_path, const std::string& config, const fs::path& out,
              std::string report) {
  denoise::HyperGrid grid;
  if (!grid_path.empty()) {
    try {
      grid = pipeline::hyper_grid_from_json(load_json(grid_path));
    } catch (const std::runtime_error&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("{}: {}", grid_path, e.what()));
    }
  } else {
    grid = load_run_config(config).grid;
  }
  if (report.empty()) report = (out.parent_path() / (out.stem().string() + "_report.json")).string();
  const auto fit = denoise::fit_suite(io::read_dataset(in), grid);
  io::write_text_file(out, denoise::suite_to_json(fit.suite));
  write_json(report, pipeline::fit_report_json(fit));
  for (const auto& r : fit.reports) {
    fmt::print("{:<12} val_rmse {:.6g} ({} grid points)\n", component_name(r.component),
               r.grid[r.selected].val_rmse, r.grid.size());
  }
  return 0;
}

int cmd_denoise(const fs::path& suite_path, const fs::path& in, const fs::path& out) {
  const auto suite = denoise::suite_from_json(io::read_text_file(suite_path));
  require_dir(out);
  const auto ds = io::read_dataset(in);
  std::vector<ImpactRecord> records;
  for (const auto& r : ds.records()) {
    records.push_back({r.impact_id, denoise::denoise_trace(suite, r.noisy), r.reference, r.metadata});
  }
  io::write_dataset(ImpactDataset(std::move(records), ds.split(), ds.rng_seed()), out, "denoised");
  fmt::print("denoised {} impacts into {}\n", ds.records().size(), out.string());
  return 0;
}

int cmd_eval(const fs::path& pred_path, const fs::path& ref_path, const fs::path& out, const std::string& ba_dir,
             const std::string& split, const std::string& config) {
  const auto rc = load_run_config(config);
  const auto pred = io::read_dataset(pred_path);
  const auto ref = io::read_dataset(ref_path);
  std::map<std::string, const ImpactRecord*> by_id;
  for (const auto& r : pred.records()) by_id[r.impact_id] = &r;

  std::vector<std::string> ids;
  std::vector<KinematicsTrace> original, denoised, reference;
  std::set<std::string> notes;
  for (const ImpactRecord* r : select(ref, split)) {
    if (!r->reference) continue;
    const auto it = by_id.find(r->impact_id);
    if (it == by_id.end()) {
      throw std::runtime_error(fmt::format("{}: no prediction for {}", pred_path.string(), r->impact_id));
    }
    ids.push_back(r->impact_id);
    original.push_back(r->noisy);
    denoised.push_back(it->second->noisy);
    reference.push_back(*r->reference);
    if (auto m = r->metadata.find("source"); m != r->metadata.end()) notes.insert(m->second);
  }
  auto ev = pipeline::evaluate(ids, original, denoised, reference);
  ev.notes.assign(notes.begin(), notes.end());
  Json report = pipeline::evaluation_json(ev, rc.eval_components);

  if (!ba_dir.empty()) {
    fs::create_directories(ba_dir);
    Json ba = Json::array();
    for (ComponentId c : rc.eval_components) {
      Series p, q;
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const Series a = component_series(denoised[i], c), b = component_series(reference[i], c);
        p.insert(p.end(), a.begin(), a.end());
        q.insert(q.end(), b.begin(), b.end());
      }
      const auto res = stats::bland_altman(p, q);
      std::string csv = "mean,diff\n";
      for (std::size_t i = 0; i < res.mean.size(); ++i) {
        csv += io::format_number(res.mean[i]) + "," + io::format_number(res.diff[i]) + "\n";
      }
      const fs::path file = fs::path(ba_dir) / fmt::format("bland_altman_{}.csv", component_name(c));
      io::write_text_file(file, csv);
      ba.push_back({{"component", component_name(c)},
                    {"csv", file.filename().string()},
                    {"mean_diff", res.mean_diff},
                    {"sd", res.sd},
                    {"lower", res.lower},
                    {"upper", res.upper}});
    }
    report["bland_altman"] = ba;
  }
  write_json(out, report);
  fmt::print("evaluated {} impacts: mean SNR {:.3f} -> {:.3f} dB, mean RMSE reduction {:.2f}%\n", ids.size(),
             ev.summary.mean_snr_in_db, ev.summary.mean_snr_out_db, 100.0 * ev.summary.mean_rmse_reduction);
  return 0;
}

int cmd_bic(const fs::path& in, const fs::path& out) {
  const auto ds = io::read_dataset(in);
  Json impacts = Json::array();
  for (const auto& r : ds.records()) {
    impacts.push_back({{"impact_id", r.impact_id},
                       {"noisy", pipeline::injury_metrics_json(bic::compute_all(r.noisy))},
                       {"reference", r.reference ? pipeline::injury_metrics_json(bic::compute_all(*r.reference))
                                                 : Json(nullptr)}});
  }
  write_json(out, {{"format_version", pipeline::kFormatVersion}, {"impacts", impacts}});
  fmt::print("computed injury metrics for {} impacts\n", ds.records().size());
  return 0;
}

int cmd_compare_filter(const fs::path& in, const fs::path& suite_path, const std::string& orders,
                       const std::string& cutoffs, const fs::path& out, const std::string& split) {
  const auto suite = denoise::suite_from_json(io::read_text_file(suite_path));
  const auto ds = io::read_dataset(in);
  std::vector<KinematicsTrace> noisy, reference, denoised;
  for (const ImpactRecord* r : select(ds, split)) {
    if (!r->reference) continue;
    noisy.push_back(r->noisy);
    reference.push_back(*r->reference);
    denoised.push_back(denoise::denoise_trace(suite, r->noisy));
  }
  if (noisy.size() < 3) throw std::runtime_error(fmt::format("{}: need at least 3 paired impacts", in.string()));
  const auto grid =
      pipeline::compare_filters(noisy, reference, parse_int_range(orders), pipeline::parse_range(cutoffs));
  const pipeline::FilterGridRow suite_row{0, 0, stats::error_report(denoised, reference)};
  write_json(out, pipeline::filter_comparison_json(grid, suite_row));
  fmt::print("compared {} filter settings against the suite\n", grid.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Denoising of mouthguard head-impact kinematics"};
  app.require_subcommand(1);
  std::string config, in, out, grid, report, suite, pred, ref, ba_dir, split = "test";
  std::string orders = "5:9", cutoffs = "20:160:20";
  int status = 0;

  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic paired dataset");
  synth->add_option("--config", config, "run config JSON (synth section used)");
  synth->add_option("--out", out, "existing output directory")->required();
  synth->callback([&] { status = cmd_synth(config, out); });

  auto* pre = app.add_subcommand("preprocess", "Low-pass, align and window a dataset");
  pre->add_option("--in", in, "input manifest")->required();
  pre->add_option("--out", out, "existing output directory")->required();
  pre->add_option("--config", config, "run config JSON (preprocess section used)");
  pre->callback([&] { status = cmd_preprocess(in, out, config); });

  auto* train = app.add_subcommand("train", "Grid-search and train the six component models");
  train->add_option("--in", in, "full-length preprocessed manifest")->required();
  auto* g = train->add_option("--grid", grid, "hyperparameter grid JSON");
  auto* c = train->add_option("--config", config, "run config JSON (train section used)");
  g->excludes(c);
  train->add_option("--out", out, "suite JSON to write")->required();
  train->add_option("--report", report, "validation report (default <out>_report.json)");
  train->callback([&] {
    if (grid.empty() && config.empty()) throw CLI::ValidationError("train", "one of --grid or --config is required");
    status = cmd_train(in, grid, config, out, report);
  });

  auto* den = app.add_subcommand("denoise", "Denoise every trace of a dataset");
  den->add_option("--suite", suite, "suite JSON")->required();
  den->add_option("--in", in, "input manifest")->required();
  den->add_option("--out", out, "existing output directory")->required();
  den->callback([&] { status = cmd_denoise(suite, in, out); });

  auto* ev = app.add_subcommand("eval", "Errors and Wilcoxon tests of denoised vs original traces");
  ev->add_option("--pred", pred, "manifest of denoised traces")->required();
  ev->add_option("--ref", ref, "manifest with original noisy and reference traces")->required();
  ev->add_option("--out", out, "report JSON")->required();
  ev->add_option("--bland-altman", ba_dir, "directory for mean,diff CSVs");
  ev->add_option("--split", split, "train, val, test or all")->capture_default_str();
  ev->add_option("--config", config, "run config JSON (eval section used)");
  ev->callback([&] { status = cmd_eval(pred, ref, out, ba_dir, split, config); });

  auto* b = app.add_subcommand("bic", "Injury criteria per impact");
  b->add_option("--in", in, "input manifest")->required();
  b->add_option("--out", out, "JSON to write")->required();
  b->callback([&] { status = cmd_bic(in, out); });

  auto* cf = app.add_subcommand("compare-filter", "Butterworth-only denoising grid vs the suite");
  cf->add_option("--in", in, "input manifest")->required();
  cf->add_option("--suite", suite, "suite JSON")->required();
  cf->add_option("--orders", orders, "lo:hi[:step]")->capture_default_str();
  cf->add_option("--cutoffs", cutoffs, "lo:hi[:step] in Hz")->capture_default_str();
  cf->add_option("--out", out, "JSON to write")->required();
  cf->add_option("--split", split, "train, val, test or all")->capture_default_str();
  cf->callback([&] { status = cmd_compare_filter(in, suite, orders, cutoffs, out, split); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return status;
}
