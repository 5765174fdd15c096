#include "mupf/simulate.hpp"

#include <cmath>
#include <random>

#include "mupf/error.hpp"
#include "mupf/rng.hpp"

namespace mupf {

void ScenarioSpec::validate() const {
  if (measurements < 1) throw Error(ErrorCode::InvalidConfig, "scenario needs L >= 1 measurements");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorCode::InvalidConfig, "noise_sigma must be finite and >= 0");
  }
  if (!true_pose.to_vector().allFinite()) throw Error(ErrorCode::InvalidConfig, "true pose must be finite");
}

Vec3 sample_triangle(const Vec3& a, const Vec3& b, const Vec3& c, double u1, double u2) {
  const double s = std::sqrt(u1);
  return (1.0 - s) * a + s * (1.0 - u2) * b + s * u2 * c;
}

SimulatedContacts sample_contacts(const ScenarioSpec& spec, const TriMesh& mesh) {
  spec.validate();
  std::vector<std::size_t> faces;
  if (spec.face_subset) {
    faces = *spec.face_subset;
    if (faces.empty()) throw Error(ErrorCode::InvalidFaceSubset, "face subset is empty");
    for (auto f : faces) {
      if (f >= mesh.face_count()) {
        throw Error(ErrorCode::InvalidFaceSubset, "face " + std::to_string(f) + " out of range (mesh has " +
                                                      std::to_string(mesh.face_count()) + " faces)");
      }
    }
  } else {
    faces.resize(mesh.face_count());
    for (std::size_t i = 0; i < faces.size(); ++i) faces[i] = i;
  }

  auto rng = make_rng(spec.seed, 0, 0, RngStream::Simulation);
  std::uniform_int_distribution<std::size_t> pick(0, faces.size() - 1);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  SimulatedContacts out;
  for (std::size_t k = 0; k < spec.measurements; ++k) {
    const std::size_t f = faces[pick(rng)];
    const double u1 = uni(rng);
    const double u2 = uni(rng);
    const Vec3 local = sample_triangle(mesh.vertex(f, 0), mesh.vertex(f, 1), mesh.vertex(f, 2), u1, u2);
    const Vec3 contact = transform_point_into_world_frame(local, spec.true_pose);
    Vec3 eps;
    for (int c = 0; c < 3; ++c) eps[c] = noise(rng);
    out.contacts.push_back(contact);
    out.measurements.push_back(contact + spec.noise_sigma * eps);
    out.faces.push_back(f);
  }
  return out;
}

ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "scenario must be an object");
  ScenarioSpec s;
  try {
    if (j.contains("mesh")) {
      std::filesystem::path p = j.at("mesh").get<std::string>();
      s.mesh_path = p.is_absolute() ? p : base_dir / p;
    }
    if (j.contains("true_pose")) {
      const auto v = j.at("true_pose").get<std::vector<double>>();
      if (v.size() != 6) throw Error(ErrorCode::InvalidConfig, "true_pose must have 6 entries");
      s.true_pose = {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
    if (j.contains("L")) {
      if (!j.at("L").is_number_integer() || j.at("L").get<long long>() < 0) {
        throw Error(ErrorCode::InvalidConfig, "L must be a non-negative integer");
      }
      s.measurements = j.at("L").get<std::size_t>();
    }
    if (j.contains("face_subset") && !j.at("face_subset").is_null()) {
      s.face_subset = j.at("face_subset").get<std::vector<std::size_t>>();
    }
    if (j.contains("noise_sigma")) s.noise_sigma = j.at("noise_sigma").get<double>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  return s;
}

nlohmann::json to_json(const ScenarioSpec& s) {
  nlohmann::json j;
  j["mesh"] = s.mesh_path.filename().string();
  const auto& p = s.true_pose;
  j["true_pose"] = {p.x, p.y, p.z, p.phi, p.theta, p.psi};
  j["L"] = s.measurements;
  j["face_subset"] = s.face_subset ? nlohmann::json(*s.face_subset) : nlohmann::json(nullptr);
  j["noise_sigma"] = s.noise_sigma;
  j["seed"] = s.seed;
  return j;
}

}  // namespace mupf
