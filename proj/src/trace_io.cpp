#include "impact/trace_io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace impact::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v) { return fmt::format("{}", v); }

std::string trace_to_csv(const KinematicsTrace& trace) {
  std::string out(kTraceCsvHeader);
  out += '\n';
  auto it = std::back_inserter(out);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    fmt::format_to(it, "{}", trace.time_at(i));
    for (int c = 0; c < kNumTrainable; ++c) fmt::format_to(it, ",{}", trace.channel(c)[i]);
    out += '\n';
  }
  return out;
}

namespace {

double parse_double(std::string_view field, const std::string& origin, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw std::runtime_error(fmt::format("{}:{}: bad number '{}'", origin, line, field));
  }
  return v;
}

}  // namespace

KinematicsTrace trace_from_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(origin + ": empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceCsvHeader) {
    throw std::runtime_error(origin + ": unexpected header '" + line + "'");
  }

  std::vector<double> times;
  KinematicsTrace::Channels channels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::array<double, 7> row{};
    std::size_t start = 0;
    for (std::size_t f = 0; f < row.size(); ++f) {
      const std::size_t comma = line.find(',', start);
      const bool last = f + 1 == row.size();
      if (last != (comma == std::string::npos)) {
        throw std::runtime_error(fmt::format("{}:{}: expected 7 fields", origin, line_no));
      }
      const std::size_t end = last ? line.size() : comma;
      row[f] = parse_double(std::string_view(line).substr(start, end - start), origin, line_no);
      start = end + 1;
    }
    times.push_back(row[0]);
    for (int c = 0; c < kNumTrainable; ++c) channels[static_cast<std::size_t>(c)].push_back(row[c + 1]);
  }
  if (times.empty()) throw std::runtime_error(origin + ": trace has no samples");

  const double dt = 1.0 / kCanonicalSampleRateHz;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = times[0] + static_cast<double>(i) * dt;
    if (std::abs(times[i] - expected) > 1e-6 * dt + 1e-9 * std::abs(expected)) {
      throw std::runtime_error(
          fmt::format("{}: time column is not uniform at 1 kHz (row {})", origin, i + 1));
    }
  }
  return KinematicsTrace(std::move(channels), kCanonicalSampleRateHz, times[0]);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot write " + path.string() + ": " + ec.message());
  }
}

void write_trace_csv(const fs::path& path, const KinematicsTrace& trace) {
  write_text_file(path, trace_to_csv(trace));
}

KinematicsTrace read_trace_csv(const fs::path& path) {
  return trace_from_csv(read_text_file(path), path.string());
}

fs::path write_dataset(const ImpactDataset& dataset, const fs::path& dir, const std::string& noisy_tag) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("output directory does not exist: " + dir.string());
  }
  json records = json::array();
  for (const auto& r : dataset.records()) {
    const std::string noisy_name = r.impact_id + "_" + noisy_tag + ".csv";
    write_trace_csv(dir / noisy_name, r.noisy);
    json entry;
    entry["impact_id"] = r.impact_id;
    entry["noisy_path"] = noisy_name;
    if (r.reference) {
      const std::string ref_name = r.impact_id + "_reference.csv";
      write_trace_csv(dir / ref_name, *r.reference);
      entry["reference_path"] = ref_name;
    } else {
      entry["reference_path"] = nullptr;
    }
    entry["split"] = std::string(split_name(dataset.split_of(r.impact_id)));
    entry["metadata"] = r.metadata;
    records.push_back(std::move(entry));
  }
  json manifest;
  manifest["format_version"] = kManifestFormatVersion;
  manifest["records"] = std::move(records);
  manifest["seed"] = dataset.rng_seed();
  const fs::path path = dir / "manifest.json";
  write_text_file(path, manifest.dump(2) + "\n");
  return path;
}

ImpactDataset read_dataset(const fs::path& manifest_path) {
  json manifest;
  try {
    manifest = json::parse(read_text_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw std::runtime_error(manifest_path.string() + ": " + e.what());
  }
  if (manifest.value("format_version", 0) != kManifestFormatVersion) {
    throw std::runtime_error(manifest_path.string() + ": unsupported format_version");
  }
  const fs::path base = manifest_path.parent_path();
  const auto resolve = [&base](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
  };

  std::vector<ImpactRecord> records;
  std::map<std::string, Split> split;
  for (const auto& entry : manifest.at("records")) {
    ImpactRecord r{entry.at("impact_id").get<std::string>(),
                   read_trace_csv(resolve(entry.at("noisy_path").get<std::string>())),
                   std::nullopt,
                   {}};
    const auto& ref = entry.at("reference_path");
    if (!ref.is_null()) r.reference = read_trace_csv(resolve(ref.get<std::string>()));
    if (entry.contains("metadata")) {
      r.metadata = entry.at("metadata").get<std::map<std::string, std::string>>();
    }
    split[r.impact_id] = split_from_name(entry.at("split").get<std::string>());
    records.push_back(std::move(r));
  }
  return ImpactDataset(std::move(records), std::move(split),
                       manifest.value("seed", std::uint64_t{0}));
}

}  // namespace impact::io
