#pragma once

#include <filesystem>
#include <string>

#include "impact/core_types.hpp"

namespace impact::io {

inline constexpr std::string_view kTraceCsvHeader =
    "time_s,lin_acc_x_g,lin_acc_y_g,lin_acc_z_g,ang_vel_x_rads,ang_vel_y_rads,ang_vel_z_rads";

inline constexpr int kManifestFormatVersion = 1;

/// Shortest decimal that round-trips the double exactly.
std::string format_number(double v);

std::string trace_to_csv(const KinematicsTrace& trace);
KinematicsTrace trace_from_csv(const std::string& text, const std::string& origin = "<memory>");

void write_trace_csv(const std::filesystem::path& path, const KinematicsTrace& trace);
/// Reads a trace and checks that the time column is uniform at 1 kHz.
KinematicsTrace read_trace_csv(const std::filesystem::path& path);

/// Writes "<id>_<noisy_tag>.csv", "<id>_reference.csv" and manifest.json into
/// dir, which must already exist. Returns the manifest path.
std::filesystem::path write_dataset(const ImpactDataset& dataset,
                                    const std::filesystem::path& dir,
                                    const std::string& noisy_tag = "noisy");

/// Loads a manifest and every trace it names; relative trace paths resolve
/// against the manifest's directory.
ImpactDataset read_dataset(const std::filesystem::path& manifest_path);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename so a failed write leaves no partial output.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace impact::io
