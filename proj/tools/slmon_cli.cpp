// Command line front end: `assess`, `synth` and `plotdata`.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "slmon/slmon.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;

int exit_code_for(const slmon::Error& e) {
  return e.code() == slmon::ErrorCode::ConfigError ? kExitConfig : kExitData;
}

slmon::Json load_with_seed(const fs::path& path, const std::optional<std::uint64_t>& seed) {
  slmon::Json doc = slmon::read_json_file(path);
  if (seed) {
    if (doc.is_object() && doc.contains("config") && doc.contains("pairs")) {
      doc["config"]["seed"] = *seed;
    } else if (doc.is_object()) {
      doc["seed"] = *seed;
    }
  }
  return doc;
}

int run_assess(const fs::path& config_path, const std::optional<fs::path>& out,
               const std::optional<std::uint64_t>& seed) {
  const fs::path base = fs::absolute(config_path).parent_path();
  const slmon::RunConfig config = slmon::parse_run_config(load_with_seed(config_path, seed), base);
  fs::path out_dir = out ? *out : fs::path(config.output_dir);
  if (!out && out_dir.is_relative()) out_dir = base / out_dir;

  const slmon::RunReport report = slmon::assess(config);
  slmon::write_report(report, out_dir);

  std::size_t flagged = 0;
  for (const auto& pair : report.pairs) {
    for (const auto& r : pair.records) flagged += r.flagged ? 1 : 0;
  }
  std::cout << "assessed " << config.systems.size() << " systems over " << report.grid.steps << " steps, "
            << report.pairs.size() << " pairs, " << flagged << " flagged records -> " << out_dir.string() << "\n";
  return kExitOk;
}

int run_synth(const fs::path& config_path, const std::optional<fs::path>& out,
              const std::optional<std::uint64_t>& seed) {
  const slmon::ScenarioSpec spec = slmon::parse_scenario(load_with_seed(config_path, seed));
  const fs::path out_dir = out ? *out : config_path.parent_path() / "synth";
  const auto files = slmon::run_synth(spec, out_dir);
  std::cout << "wrote " << files.size() << " trajectories and run.json -> " << out_dir.string() << "\n";
  return kExitOk;
}

int run_plotdata(const fs::path& manifest_path, const std::optional<fs::path>& out) {
  const slmon::RunReport report = slmon::read_report(manifest_path);
  const fs::path out_dir = out ? *out : manifest_path.parent_path() / "plot";
  slmon::write_plotdata(report, out_dir);
  std::cout << "wrote " << report.pairs.size() << " plot series -> " << out_dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-validation of localization systems with subjective-logic opinions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, const std::string& config_help, bool with_seed) {
    sub->add_option("--config", config_path, config_help)->required();
    sub->add_option("--out", out_path, "output directory");
    if (with_seed) sub->add_option("--seed", seed, "overrides the configured seed");
  };

  CLI::App* assess = app.add_subcommand("assess", "run the cross-validation and write a report");
  add_common(assess, "run configuration (JSON) or a run manifest", true);
  CLI::App* synth = app.add_subcommand("synth", "write synthetic trajectories for a scenario");
  add_common(synth, "scenario specification (JSON)", true);
  CLI::App* plotdata = app.add_subcommand("plotdata", "turn a report into plot-ready series");
  add_common(plotdata, "manifest.json of a finished report", false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::optional<fs::path> out = out_path.empty() ? std::nullopt : std::optional<fs::path>(out_path);
  std::optional<std::uint64_t> seed_override;
  for (CLI::App* sub : {assess, synth}) {
    if (sub->parsed() && sub->count("--seed") > 0) seed_override = seed;
  }

  try {
    if (assess->parsed()) return run_assess(config_path, out, seed_override);
    if (synth->parsed()) return run_synth(config_path, out, seed_override);
    return run_plotdata(config_path, out);
  } catch (const slmon::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
