#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mupf/config.hpp"
#include "mupf/metrics.hpp"
#include "mupf/simulate.hpp"

namespace mupf::cli {

/// Everything a subcommand needs, after the config file and flags have been
/// merged. Flags win over file values.
struct RunManifest {
  FilterConfig filter;
  std::optional<ScenarioSpec> scenario;
  std::optional<std::filesystem::path> mesh_path;
  std::optional<std::filesystem::path> measurements_path;
  std::optional<std::filesystem::path> truth_path;
  std::size_t trials = 1;
  bool vary_measurements = false;
  SuccessCriteria success;
  std::filesystem::path output_dir = ".";
  bool emit_trace = false;
  std::vector<std::size_t> sweep_m;

  /// Throws Error{InvalidConfig | Io} on missing files or bad values.
  void validate() const;
  std::filesystem::path resolved_mesh() const;
};

struct Overrides {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> mesh;
  std::optional<std::filesystem::path> measurements;
  std::optional<std::filesystem::path> truth;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> threads;
  std::optional<std::size_t> particles;
  std::optional<std::size_t> memory;
  std::optional<std::string> sweep_m;
  std::filesystem::path output = ".";
  bool emit_trace = false;
};

RunManifest build_manifest(const Overrides& o);

/// "1..15", "1,5,10" or "1..15:2".
std::vector<std::size_t> parse_sweep(const std::string& text);

nlohmann::json manifest_json(const RunManifest& m);

int cmd_simulate(const RunManifest& m);
int cmd_localize(const RunManifest& m);
int cmd_batch(const RunManifest& m);

}  // namespace mupf::cli
