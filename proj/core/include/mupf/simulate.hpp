#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "mupf/geometry.hpp"
#include "mupf/mesh.hpp"

namespace mupf {

struct ScenarioSpec {
  std::filesystem::path mesh_path;
  Pose true_pose;
  std::size_t measurements = 15;  // L
  /// Faces contacts are drawn from; all faces when unset.
  std::optional<std::vector<std::size_t>> face_subset;
  double noise_sigma = 0.0;  // meters, isotropic in the world frame
  std::uint64_t seed = 1;

  /// Throws Error{InvalidConfig} for L = 0 or a negative noise level.
  void validate() const;
};

struct SimulatedContacts {
  std::vector<Vec3> measurements;  // noisy, world frame
  std::vector<Vec3> contacts;      // noise-free surface points, world frame
  std::vector<std::size_t> faces;  // source face of each contact
};

/// Draws L contacts: a face uniformly from the subset, a uniform point on it
/// (square-root barycentric trick), posed by the true pose, plus Gaussian
/// noise. Throws Error{InvalidFaceSubset} on empty or out-of-range subsets.
SimulatedContacts sample_contacts(const ScenarioSpec& spec, const TriMesh& mesh);

/// Uniform point on triangle (a, b, c) from two U(0,1) numbers.
Vec3 sample_triangle(const Vec3& a, const Vec3& b, const Vec3& c, double u1, double u2);

/// Relative mesh paths resolve against `base_dir`.
ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json to_json(const ScenarioSpec& s);

}  // namespace mupf
