#include "commands.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>

#include "mupf/error.hpp"
#include "mupf/mesh.hpp"
#include "mupf/mupf.hpp"
#include "mupf/report_io.hpp"

namespace mupf::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kDegToRad = std::numbers::pi / 180.0;

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  try {
    return nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

std::size_t parse_count(std::string_view s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::InvalidConfig, "bad number '" + std::string(s) + "' in --sweep-m");
  }
  return v;
}

Pose truth_from_file(const fs::path& path) {
  const auto j = read_json_file(path);
  try {
    const auto& p = j.at("true_pose");
    return {p.at("x").get<double>(),   p.at("y").get<double>(),     p.at("z").get<double>(),
            p.at("phi").get<double>(), p.at("theta").get<double>(), p.at("psi").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

struct TrialInputs {
  std::vector<Vec3> measurements;
  std::optional<Pose> truth;
};

TrialInputs trial_inputs(const RunManifest& m, const TriMesh& mesh, std::size_t trial) {
  TrialInputs in;
  if (m.measurements_path) {
    in.measurements = read_measurements_csv(*m.measurements_path);
    if (in.measurements.empty()) throw Error(ErrorCode::InvalidConfig, "measurement file is empty");
    if (m.truth_path) in.truth = truth_from_file(*m.truth_path);
    return in;
  }
  ScenarioSpec spec = *m.scenario;
  if (m.vary_measurements) spec.seed += trial;
  in.measurements = sample_contacts(spec, mesh).measurements;
  in.truth = spec.true_pose;
  return in;
}

nlohmann::json success_json(const SuccessCriteria& s) {
  return {{"position", s.position},
          {"orientation_deg", s.orientation / kDegToRad},
          {"index", s.index}};
}

}  // namespace

std::vector<std::size_t> parse_sweep(const std::string& text) {
  std::vector<std::size_t> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    std::string rest = text.substr(dots + 2);
    std::size_t stride = 1;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      stride = parse_count(rest.substr(colon + 1));
      rest = rest.substr(0, colon);
    }
    const std::size_t lo = parse_count(text.substr(0, dots));
    const std::size_t hi = parse_count(rest);
    if (lo < 1 || hi < lo || stride < 1) throw Error(ErrorCode::InvalidConfig, "bad --sweep-m range");
    for (std::size_t v = lo; v <= hi; v += stride) out.push_back(v);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const std::size_t v = parse_count(item);
      if (v < 1) throw Error(ErrorCode::InvalidConfig, "--sweep-m values must be >= 1");
      out.push_back(v);
    }
  }
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "empty --sweep-m");
  return out;
}

RunManifest build_manifest(const Overrides& o) {
  RunManifest m;
  fs::path base_dir = ".";
  nlohmann::json file = nlohmann::json::object();
  if (o.config) {
    if (!fs::exists(*o.config)) throw Error(ErrorCode::Io, "config file not found: " + o.config->string());
    file = read_json_file(*o.config);
    base_dir = o.config->parent_path();
  }

  try {
    const std::string profile = file.value("profile", std::string("simulation"));
    FilterConfig base;
    if (profile == "simulation") base = FilterConfig::simulation();
    else if (profile == "experimental") base = FilterConfig::experimental();
    else throw Error(ErrorCode::InvalidConfig, "unknown profile '" + profile + "'");
    m.filter = file.contains("filter") ? filter_config_from_json(file.at("filter"), base) : base;

    if (file.contains("scenario")) m.scenario = scenario_from_json(file.at("scenario"), base_dir);
    if (file.contains("mesh")) {
      fs::path p = file.at("mesh").get<std::string>();
      m.mesh_path = p.is_absolute() ? p : base_dir / p;
    }
    if (file.contains("trials")) m.trials = file.at("trials").get<std::size_t>();
    m.vary_measurements = file.value("vary_measurements", false);
    if (file.contains("success")) {
      const auto& s = file.at("success");
      m.success.position = s.value("position", m.success.position);
      m.success.orientation = s.value("orientation_deg", m.success.orientation / kDegToRad) * kDegToRad;
      m.success.index = s.value("index", m.success.index);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }

  if (o.mesh) m.mesh_path = *o.mesh;
  if (o.measurements) m.measurements_path = *o.measurements;
  if (o.truth) m.truth_path = *o.truth;
  if (o.seed) {
    m.filter.seed = *o.seed;
    if (m.scenario) m.scenario->seed = *o.seed;
  }
  if (o.trials) m.trials = *o.trials;
  if (o.threads) m.filter.threads = *o.threads;
  if (o.particles) m.filter.particles = *o.particles;
  if (o.memory) m.filter.memory = *o.memory;
  if (o.sweep_m) m.sweep_m = parse_sweep(*o.sweep_m);
  m.output_dir = o.output;
  m.emit_trace = o.emit_trace;
  m.validate();
  return m;
}

fs::path RunManifest::resolved_mesh() const {
  if (mesh_path) return *mesh_path;
  if (scenario && !scenario->mesh_path.empty()) return scenario->mesh_path;
  throw Error(ErrorCode::InvalidConfig, "no mesh given (use --mesh or a scenario mesh)");
}

void RunManifest::validate() const {
  filter.validate();
  if (trials < 1) throw Error(ErrorCode::InvalidConfig, "trials must be >= 1");
  const fs::path mesh = resolved_mesh();
  if (!fs::exists(mesh)) throw Error(ErrorCode::Io, "mesh file not found: " + mesh.string());
  if (measurements_path && !fs::exists(*measurements_path)) {
    throw Error(ErrorCode::Io, "measurement file not found: " + measurements_path->string());
  }
  if (truth_path && !fs::exists(*truth_path)) {
    throw Error(ErrorCode::Io, "truth file not found: " + truth_path->string());
  }
  if (scenario) scenario->validate();
  for (auto v : sweep_m) {
    if (v < 1) throw Error(ErrorCode::InvalidConfig, "--sweep-m values must be >= 1");
  }
}

nlohmann::json manifest_json(const RunManifest& m) {
  nlohmann::json j;
  j["filter"] = to_json(m.filter);
  j["mesh"] = m.resolved_mesh().filename().string();
  j["scenario"] = m.scenario && !m.measurements_path ? to_json(*m.scenario) : nlohmann::json(nullptr);
  j["measurements"] = m.measurements_path ? nlohmann::json(m.measurements_path->filename().string())
                                          : nlohmann::json(nullptr);
  j["trials"] = m.trials;
  j["vary_measurements"] = m.vary_measurements;
  j["success"] = success_json(m.success);
  return j;
}

int cmd_simulate(const RunManifest& m) {
  if (!m.scenario) throw Error(ErrorCode::InvalidConfig, "simulate needs a scenario section in --config");
  ScenarioSpec spec = *m.scenario;
  if (m.mesh_path) spec.mesh_path = *m.mesh_path;
  const TriMesh mesh = load_obj(spec.mesh_path);
  const SimulatedContacts contacts = sample_contacts(spec, mesh);
  write_measurements_csv(m.output_dir / "measurements.csv", contacts.measurements);
  write_file_atomic(m.output_dir / "ground_truth.json", dump_json(ground_truth_json(spec, contacts)));
  std::cout << "wrote " << contacts.measurements.size() << " measurements to "
            << (m.output_dir / "measurements.csv").string() << '\n';
  return 0;
}

int cmd_localize(const RunManifest& m) {
  if (!m.measurements_path && !m.scenario) {
    throw Error(ErrorCode::InvalidConfig, "localize needs --measurements or a scenario");
  }
  auto mesh = std::make_shared<const TriMesh>(load_obj(m.resolved_mesh()));
  const MeasurementModel model = make_model(mesh, m.filter);
  const TrialInputs in = trial_inputs(m, *mesh, 0);

  const RunResult result = run(in.measurements, model, m.filter, in.truth, m.success);

  nlohmann::json out;
  out["schema"] = "mupf.localize";
  out["schema_version"] = kReportSchemaVersion;
  out["manifest"] = manifest_json(m);
  out["report"] = report_json(result.report);
  write_file_atomic(m.output_dir / "report.json", dump_json(out));
  const TrialReport one[] = {result.report};
  write_file_atomic(m.output_dir / "timing.json", dump_json(timing_json(one)));
  if (m.emit_trace) {
    write_file_atomic(m.output_dir / "trace.csv", format_trace_csv(result.report.index_trace));
  }
  std::cout << "final index " << result.report.final_index << " m, "
            << (result.report.success ? "success" : "failure") << '\n';
  return 0;
}

namespace {

std::vector<TrialReport> run_trials(const RunManifest& m, const MeasurementModel& model,
                                    const FilterConfig& filter, bool emit_trace,
                                    const fs::path& trace_dir) {
  std::vector<TrialReport> reports;
  for (std::size_t i = 0; i < m.trials; ++i) {
    FilterConfig cfg = filter;
    cfg.seed = filter.seed + i;
    const TrialInputs in = trial_inputs(m, model.mesh(), i);
    RunResult r = run(in.measurements, model, cfg, in.truth, m.success);
    if (emit_trace) {
      write_file_atomic(trace_dir / ("trace_" + std::to_string(i) + ".csv"),
                        format_trace_csv(r.report.index_trace));
    }
    reports.push_back(std::move(r.report));
  }
  return reports;
}

}  // namespace

int cmd_batch(const RunManifest& m) {
  if (!m.measurements_path && !m.scenario) {
    throw Error(ErrorCode::InvalidConfig, "batch needs --measurements or a scenario");
  }
  auto mesh = std::make_shared<const TriMesh>(load_obj(m.resolved_mesh()));
  const MeasurementModel model = make_model(mesh, m.filter);

  nlohmann::json out;
  out["schema"] = "mupf.batch";
  out["schema_version"] = kReportSchemaVersion;
  out["manifest"] = manifest_json(m);

  if (m.sweep_m.empty()) {
    const auto reports = run_trials(m, model, m.filter, m.emit_trace, m.output_dir);
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& r : reports) trials.push_back(report_json(r));
    out["trials"] = trials;
    out["summary"] = summary_json(reports);
    write_file_atomic(m.output_dir / "summary.json", dump_json(out));
    write_file_atomic(m.output_dir / "timing.json", dump_json(timing_json(reports)));
    std::cout << out["summary"]["successes"] << "/" << reports.size() << " successes, mean index "
              << out["summary"]["mean_index"] << " m\n";
    return 0;
  }

  std::string csv = "m,mean_index,median_index,successes,trials\n";
  nlohmann::json sweep = nlohmann::json::array();
  std::vector<TrialReport> all;
  for (const std::size_t window : m.sweep_m) {
    FilterConfig cfg = m.filter;
    cfg.memory = window;
    const auto reports = run_trials(m, model, cfg, false, m.output_dir);
    nlohmann::json s = summary_json(reports);
    s["m"] = window;
    sweep.push_back(s);
    std::ostringstream row;
    row.precision(9);
    row << window << ',' << s["mean_index"].get<double>() << ',' << s["median_index"].get<double>()
        << ',' << s["successes"].get<std::size_t>() << ',' << reports.size() << '\n';
    csv += row.str();
    all.insert(all.end(), reports.begin(), reports.end());
  }
  out["sweep_m"] = sweep;
  write_file_atomic(m.output_dir / "summary.json", dump_json(out));
  write_file_atomic(m.output_dir / "sweep_m.csv", csv);
  write_file_atomic(m.output_dir / "timing.json", dump_json(timing_json(all)));
  std::cout << csv;
  return 0;
}

}  // namespace mupf::cli
