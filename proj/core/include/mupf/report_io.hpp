#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mupf/config.hpp"
#include "mupf/metrics.hpp"
#include "mupf/simulate.hpp"

namespace mupf {

inline constexpr int kReportSchemaVersion = 1;

/// `x,y,z` header, one row per point, 9 significant digits.
std::string format_measurements_csv(std::span<const Vec3> points);
void write_measurements_csv(const std::filesystem::path& path, std::span<const Vec3> points);
std::vector<Vec3> read_measurements_csv(const std::filesystem::path& path);
std::vector<Vec3> parse_measurements_csv(std::string_view text);

nlohmann::json ground_truth_json(const ScenarioSpec& spec, const SimulatedContacts& contacts);

/// Deterministic part of a trial report; wall-clock time is left out so
/// reruns compare byte for byte.
nlohmann::json report_json(const TrialReport& report);

/// Aggregate over trials: mean/median index, mean errors, success count.
nlohmann::json summary_json(std::span<const TrialReport> reports);

/// Mean and max elapsed seconds.
nlohmann::json timing_json(std::span<const TrialReport> reports);

/// `t,index` rows.
std::string format_trace_csv(std::span<const double> trace);

/// Writes to a sibling temporary and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string dump_json(const nlohmann::json& j);

}  // namespace mupf
