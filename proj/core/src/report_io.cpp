#include "mupf/report_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mupf/error.hpp"

namespace mupf {

namespace {

std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

nlohmann::json pose_json(const Pose& p) {
  return {{"x", p.x}, {"y", p.y}, {"z", p.z}, {"phi", p.phi}, {"theta", p.theta}, {"psi", p.psi}};
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string format_measurements_csv(std::span<const Vec3> points) {
  std::string out = "x,y,z\n";
  for (const auto& p : points) {
    out += format_g9(p.x()) + ',' + format_g9(p.y()) + ',' + format_g9(p.z()) + '\n';
  }
  return out;
}

void write_measurements_csv(const std::filesystem::path& path, std::span<const Vec3> points) {
  write_file_atomic(path, format_measurements_csv(points));
}

std::vector<Vec3> parse_measurements_csv(std::string_view text) {
  std::vector<Vec3> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.find_first_of("xyzXYZ") != std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    Vec3 p;
    std::string extra;
    if (!(row >> p.x() >> p.y() >> p.z()) || (row >> extra)) {
      throw Error(ErrorCode::Io, "malformed measurement on line " + std::to_string(line_no));
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Vec3> read_measurements_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open measurements " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_measurements_csv(buf.str());
}

nlohmann::json ground_truth_json(const ScenarioSpec& spec, const SimulatedContacts& contacts) {
  nlohmann::json j;
  j["schema"] = "mupf.ground_truth";
  j["schema_version"] = kReportSchemaVersion;
  j["true_pose"] = pose_json(spec.true_pose);
  j["seed"] = spec.seed;
  j["noise_sigma"] = spec.noise_sigma;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& c : contacts.contacts) pts.push_back({c.x(), c.y(), c.z()});
  j["contacts"] = pts;
  j["faces"] = contacts.faces;
  return j;
}

nlohmann::json report_json(const TrialReport& r) {
  nlohmann::json j;
  j["schema"] = "mupf.trial_report";
  j["schema_version"] = kReportSchemaVersion;
  j["seed"] = r.seed;
  j["estimate"] = pose_json(r.estimate);
  j["final_index"] = r.final_index;
  j["index_trace"] = r.index_trace;
  if (r.error) {
    j["position_error"] = r.error->position;
    j["orientation_error"] = r.error->orientation;
  } else {
    j["position_error"] = nullptr;
    j["orientation_error"] = nullptr;
  }
  j["success"] = r.success;
  j["degenerate_events"] = r.degenerate_events;
  return j;
}

nlohmann::json summary_json(std::span<const TrialReport> reports) {
  nlohmann::json j;
  std::vector<double> idx;
  double pos = 0.0, ori = 0.0;
  std::size_t with_truth = 0, successes = 0;
  for (const auto& r : reports) {
    idx.push_back(r.final_index);
    if (r.success) ++successes;
    if (r.error) {
      pos += r.error->position;
      ori += r.error->orientation;
      ++with_truth;
    }
  }
  double mean_idx = 0.0;
  for (double v : idx) mean_idx += v;
  if (!idx.empty()) mean_idx /= static_cast<double>(idx.size());
  j["trials"] = reports.size();
  j["successes"] = successes;
  j["success_fraction"] = reports.empty() ? 0.0 : static_cast<double>(successes) / reports.size();
  j["mean_index"] = mean_idx;
  j["median_index"] = median(idx);
  if (with_truth > 0) {
    j["mean_position_error"] = pos / with_truth;
    j["mean_orientation_error"] = ori / with_truth;
  } else {
    j["mean_position_error"] = nullptr;
    j["mean_orientation_error"] = nullptr;
  }
  return j;
}

nlohmann::json timing_json(std::span<const TrialReport> reports) {
  double sum = 0.0, hi = 0.0;
  nlohmann::json per = nlohmann::json::array();
  for (const auto& r : reports) {
    sum += r.elapsed;
    hi = std::max(hi, r.elapsed);
    per.push_back(r.elapsed);
  }
  return {{"mean_seconds", reports.empty() ? 0.0 : sum / reports.size()},
          {"max_seconds", hi},
          {"per_trial_seconds", per}};
}

std::string format_trace_csv(std::span<const double> trace) {
  std::string out = "t,index\n";
  for (std::size_t t = 0; t < trace.size(); ++t) {
    out += std::to_string(t + 1) + ',' + format_g9(trace[t]) + '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::Io, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace mupf
