#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "slmon/config.hpp"

namespace slmon {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kManifestFormat = "slmon-run-manifest";

/// All records of one ordered pair (system assessed against reference).
struct PairSeries {
  std::string system;
  std::string reference;
  std::vector<AssessmentRecord> records;
};

struct RunReport {
  RunConfig config;
  TimeGrid grid;
  std::vector<PairSeries> pairs;
  double wall_time_s = 0.0;

  /// Timestamp of a step: the end of its grid interval.
  double time_of(std::size_t step) const { return grid.at(step + 1); }
};

/// Nine significant digits, locale independent.
inline std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

inline std::string pair_file_name(const std::string& system, const std::string& reference) {
  return system + "__vs__" + reference + ".csv";
}

inline std::string plot_file_name(const std::string& system, const std::string& reference) {
  return system + "__vs__" + reference + ".plot.csv";
}

/// Writes through a temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot move '" + tmp.string() + "' into place: " + ec.message());
}

inline void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "cannot create directory '" + dir.string() + "'");
  }
}

/// Loads or synthesizes one system and applies its configured faults.
inline Trajectory prepare_trajectory(const SystemConfig& system) {
  if (system.synth) {
    return synthesize(*system.synth, SynthSystem{system.id, system.kind, system.synth_rate_hz, system.faults});
  }
  return apply_faults(load_trajectory(system.path, system.id, system.kind), system.faults);
}

/**
 * Runs the whole assessment in memory: load, inject faults, bring every
 * system onto the common grid, turn per-step displacements into input
 * opinions and cross-validate all ordered pairs.
 */
inline RunReport assess(const RunConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  config.domain.validate();
  config.assessor.validate();

  std::vector<Trajectory> trajectories;
  trajectories.reserve(config.systems.size());
  for (const auto& system : config.systems) trajectories.push_back(prepare_trajectory(system));

  RunReport report{config, common_grid(trajectories, config.rate_hz), {}, 0.0};

  std::vector<std::vector<StepDelta>> deltas;
  std::vector<std::string> ids;
  for (const auto& traj : trajectories) {
    deltas.push_back(to_deltas(traj, report.grid));
    ids.push_back(traj.system_id);
  }

  Assessor assessor(ids, config.domain.joint_base_rate(), config.assessor);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (i != j) report.pairs.push_back({ids[i], ids[j], {}});
    }
  }
  for (auto& pair : report.pairs) pair.records.reserve(report.grid.steps);

  for (std::size_t step = 0; step < report.grid.steps; ++step) {
    std::map<std::string, Opinion> inputs;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const StepDelta& d = deltas[i][step];
      inputs.emplace(ids[i], input_opinion(d.dx, d.dy, config.domain));
    }
    auto records = assessor.step(inputs);
    for (std::size_t p = 0; p < records.size(); ++p) report.pairs[p].records.push_back(std::move(records[p]));
  }

  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

inline std::string pair_csv(const RunReport& report, const PairSeries& pair) {
  std::ostringstream out;
  out << "step,t,system,reference,delta,uncertainty,flagged\n";
  for (const auto& r : pair.records) {
    out << r.step << ',' << format_number(report.time_of(r.step)) << ',' << r.system << ',' << r.reference << ','
        << format_number(r.delta) << ',' << format_number(r.uncertainty) << ',' << (r.flagged ? 1 : 0) << '\n';
  }
  return out.str();
}

inline Json manifest_json(const RunReport& report) {
  Json pairs = Json::array();
  for (const auto& pair : report.pairs) {
    std::size_t flagged = 0;
    for (const auto& r : pair.records) flagged += r.flagged ? 1 : 0;
    pairs.push_back(Json{{"system", pair.system},
                         {"reference", pair.reference},
                         {"file", pair_file_name(pair.system, pair.reference)},
                         {"rows", pair.records.size()},
                         {"flagged", flagged}});
  }
  return Json{{"format", std::string(kManifestFormat)},
              {"tool_version", std::string(kToolVersion)},
              {"seed", report.config.seed},
              {"grid", {{"rate_hz", report.grid.rate_hz}, {"t_start", report.grid.t_start}, {"steps", report.grid.steps}}},
              {"config", to_json(report.config)},
              {"pairs", std::move(pairs)}};
}

/**
 * Writes one CSV per ordered pair plus `manifest.json`. Wall time goes to
 * `timing.json` so that every other file is byte-identical across reruns.
 */
inline void write_report(const RunReport& report, const std::filesystem::path& out_dir) {
  ensure_directory(out_dir);
  for (const auto& pair : report.pairs) {
    write_file_atomic(out_dir / pair_file_name(pair.system, pair.reference), pair_csv(report, pair));
  }
  write_file_atomic(out_dir / "manifest.json", manifest_json(report).dump(2) + "\n");
  write_file_atomic(out_dir / "timing.json", Json{{"wall_time_s", report.wall_time_s}}.dump(2) + "\n");
}

namespace detail {
inline RunReport read_report_entries(const Json& manifest, const std::filesystem::path& dir);
}  // namespace detail

/// Reads a report back from its manifest and pair files.
inline RunReport read_report(const std::filesystem::path& manifest_path) {
  const Json manifest = read_json_file(manifest_path);
  if (!manifest.is_object() || manifest.value("format", "") != kManifestFormat) {
    throw Error(ErrorCode::ConfigError, manifest_path.string() + ": not a run manifest");
  }
  try {
    return detail::read_report_entries(manifest, manifest_path.parent_path());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, manifest_path.string() + ": " + e.what());
  }
}

namespace detail {

inline RunReport read_report_entries(const Json& manifest, const std::filesystem::path& dir) {
  RunReport report;
  report.config = parse_run_config(manifest.at("config"));
  const Json& grid = manifest.at("grid");
  report.grid = TimeGrid{grid.at("rate_hz").get<double>(), grid.at("t_start").get<double>(),
                         grid.at("steps").get<std::size_t>()};
  for (const auto& entry : manifest.at("pairs")) {
    PairSeries pair{entry.at("system").get<std::string>(), entry.at("reference").get<std::string>(), {}};
    const auto file = dir / entry.at("file").get<std::string>();
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + file.string() + "'");
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      if (++row == 1) continue;
      if (line.empty()) continue;
      const auto fields = detail::split_fields(line);
      double step = 0, t = 0, delta = 0, u = 0, flagged = 0;
      if (fields.size() != 7 || !detail::parse_number(fields[0], step) || !detail::parse_number(fields[1], t) ||
          !detail::parse_number(fields[4], delta) || !detail::parse_number(fields[5], u) ||
          !detail::parse_number(fields[6], flagged)) {
        throw Error(ErrorCode::ParseError, file.string() + " row " + std::to_string(row) + ": malformed record");
      }
      pair.records.push_back({static_cast<std::size_t>(step), std::string(fields[2]), std::string(fields[3]), delta, u,
                              flagged != 0.0});
    }
    if (pair.records.size() != entry.at("rows").get<std::size_t>()) {
      throw Error(ErrorCode::ParseError, file.string() + ": row count disagrees with the manifest");
    }
    report.pairs.push_back(std::move(pair));
  }
  return report;
}

}  // namespace detail

/// Plot-ready series: one wide CSV per pair with the event threshold as a
/// constant column. `flagged` is derived from the serialized delta so the
/// row-wise relation holds exactly in the file.
inline void write_plotdata(const RunReport& report, const std::filesystem::path& out_dir) {
  ensure_directory(out_dir);
  const double threshold = report.config.assessor.event_threshold;
  const std::string threshold_text = format_number(threshold);
  for (const auto& pair : report.pairs) {
    std::ostringstream out;
    out << "step,t,delta,uncertainty,threshold,flagged\n";
    for (const auto& r : pair.records) {
      const std::string delta_text = format_number(r.delta);
      double written = 0.0;
      detail::parse_number(delta_text, written);
      out << r.step << ',' << format_number(report.time_of(r.step)) << ',' << delta_text << ','
          << format_number(r.uncertainty) << ',' << threshold_text << ',' << (written > threshold ? 1 : 0) << '\n';
    }
    write_file_atomic(out_dir / plot_file_name(pair.system, pair.reference), out.str());
  }
}

inline std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out << (traj.kind == TrajectoryKind::Absolute ? "t,x,y\n" : "t,dx,dy\n");
  for (const auto& s : traj.samples) {
    out << format_number(s.t) << ',' << format_number(s.x) << ',' << format_number(s.y) << '\n';
  }
  return out.str();
}

/**
 * Writes `<id>.csv` for every scenario system plus `run.json`, an assess
 * configuration with default parameters that points at those files.
 */
inline std::vector<std::filesystem::path> run_synth(const ScenarioSpec& spec, const std::filesystem::path& out_dir) {
  ensure_directory(out_dir);
  std::vector<std::filesystem::path> written;
  Json systems = Json::array();
  for (const auto& system : spec.systems) {
    const Trajectory traj = synthesize(spec.path, system);
    const auto file = out_dir / (system.id + ".csv");
    write_file_atomic(file, trajectory_csv(traj));
    written.push_back(file);
    systems.push_back(Json{{"id", system.id}, {"kind", std::string(to_string(system.kind))},
                           {"path", system.id + ".csv"}});
  }
  double common_rate = spec.systems.front().rate_hz;
  for (const auto& system : spec.systems) common_rate = std::min(common_rate, system.rate_hz);
  const Json run{{"seed", spec.seed}, {"rate_hz", common_rate}, {"output_dir", "report"}, {"systems", systems}};
  write_file_atomic(out_dir / "run.json", run.dump(2) + "\n");
  return written;
}

}  // namespace slmon
