#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "slmon/assessor.hpp"
#include "slmon/histogram.hpp"
#include "slmon/scenario.hpp"

namespace slmon {

using Json = nlohmann::ordered_json;

struct SystemConfig {
  std::string id;
  TrajectoryKind kind = TrajectoryKind::Absolute;
  std::string path;               // CSV input; empty when synthesized
  std::optional<PathSpec> synth;  // synthetic ground truth instead of a file
  double synth_rate_hz = 10.0;
  std::vector<FaultSpec> faults;
};

struct RunConfig {
  std::vector<SystemConfig> systems;
  DomainConfig domain = DomainConfig::uniform();
  AssessorParams assessor;
  double rate_hz = 10.0;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

/// Synthetic scenario for the `synth` subcommand.
struct ScenarioSpec {
  PathSpec path;
  std::uint64_t seed = 0;
  std::vector<SynthSystem> systems;
};

/// Seed for a noise fault that does not carry its own: a splitmix64 mix of
/// the run seed and the fault's position in the configuration.
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::size_t system_index, std::size_t fault_index) {
  std::uint64_t z = run_seed + 0x9E3779B97F4A7C15ULL * (1 + system_index * 1024 + fault_index);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace detail {

/// Walks a JSON document while remembering where it is, so every error
/// names the offending field.
class Reader {
public:
  Reader(const Json& node, std::string where) : node_(node), where_(std::move(where)) {
    if (!node_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw Error(ErrorCode::ConfigError, (where_.empty() ? std::string("config") : where_) + ": " + message);
  }

  const std::string& where() const { return where_; }

  std::string field(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  bool has(const std::string& key) const { return node_.contains(key); }

  const Json& raw(const std::string& key) const {
    used_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      fail("missing required field '" + key + "'");
    }
    const Json& v = raw(key);
    if (!v.is_number()) throw Error(ErrorCode::ConfigError, field(key) + ": expected a number");
    return v.get<double>();
  }

  std::uint64_t unsigned_integer(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      fail("missing required field '" + key + "'");
    }
    const Json& v = raw(key);
    if (!v.is_number_unsigned()) {
      if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
      throw Error(ErrorCode::ConfigError, field(key) + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      fail("missing required field '" + key + "'");
    }
    const Json& v = raw(key);
    if (!v.is_string()) throw Error(ErrorCode::ConfigError, field(key) + ": expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_array()) throw Error(ErrorCode::ConfigError, field(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw Error(ErrorCode::ConfigError, field(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  const Json& array(const std::string& key) const {
    const Json& v = raw(key);
    if (!v.is_array()) throw Error(ErrorCode::ConfigError, field(key) + ": expected an array");
    return v;
  }

  /// Rejects keys that were never read (typos would otherwise be ignored).
  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!used_.contains(key)) fail("unknown field '" + key + "'");
    }
  }

private:
  const Json& node_;
  std::string where_;
  mutable std::set<std::string> used_;
};

template <typename Fn>
auto rethrow_as_config(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, where + ": " + e.what());
  }
}

inline HistogramSpec parse_histogram(const Reader& r) {
  HistogramSpec spec;
  spec.min = r.number("min", spec.min);
  spec.max = r.number("max", spec.max);
  const double bins = r.number("bins", static_cast<double>(spec.bins));
  if (bins < 2 || bins != std::floor(bins)) r.fail("bins must be an integer >= 2");
  spec.bins = static_cast<std::size_t>(bins);
  r.finish();
  return spec;
}

inline FaultSpec parse_fault(const Reader& r, std::uint64_t run_seed, std::size_t system_index,
                             std::size_t fault_index) {
  FaultSpec f;
  f.kind = rethrow_as_config(r.field("kind"), [&] { return parse_fault_kind(r.string("kind")); });
  f.t_from = r.number("t_from");
  switch (f.kind) {
    case FaultKind::Jump:
      f.t_to = f.t_from;
      f.dx = r.number("dx", 0.0);
      f.dy = r.number("dy", 0.0);
      break;
    case FaultKind::Freeze:
      f.t_to = r.number("t_to");
      break;
    case FaultKind::Drift:
    case FaultKind::Noise:
      f.t_to = r.number("t_to");
      f.dx = r.number("dx", 0.0);
      f.dy = r.number("dy", 0.0);
      break;
  }
  if (f.kind == FaultKind::Noise) {
    f.seed = r.unsigned_integer("seed", derive_seed(run_seed, system_index, fault_index));
  }
  if (!std::isfinite(f.t_from) || !std::isfinite(f.t_to) || !std::isfinite(f.dx) || !std::isfinite(f.dy)) {
    r.fail("fault parameters must be finite");
  }
  if (f.t_to < f.t_from) r.fail("t_to must not precede t_from");
  r.finish();
  return f;
}

inline PathSpec parse_path(const Reader& r) {
  PathSpec p;
  p.shape = rethrow_as_config(r.field("shape"), [&] { return parse_path_shape(r.string("shape", "straight")); });
  p.duration_s = r.number("duration_s", p.duration_s);
  p.speed_mps = r.number("speed_mps", p.speed_mps);
  p.heading_deg = r.number("heading_deg", p.heading_deg);
  p.amplitude_m = r.number("amplitude_m", p.amplitude_m);
  p.period_s = r.number("period_s", p.period_s);
  p.x0 = r.number("x0", p.x0);
  p.y0 = r.number("y0", p.y0);
  r.finish();
  rethrow_as_config(r.where(), [&] {
    p.validate();
    return 0;
  });
  return p;
}

inline std::vector<FaultSpec> parse_faults(const Reader& r, std::uint64_t seed, std::size_t system_index) {
  std::vector<FaultSpec> faults;
  if (!r.has("faults")) return faults;
  const Json& list = r.array("faults");
  for (std::size_t j = 0; j < list.size(); ++j) {
    faults.push_back(parse_fault(Reader(list[j], r.field("faults") + "[" + std::to_string(j) + "]"), seed,
                                 system_index, j));
  }
  return faults;
}

}  // namespace detail

/**
 * Parses a run configuration. Relative input paths are resolved against
 * `base_dir`. A run manifest is accepted as well (its "config" member is
 * used), which makes every manifest a re-executable configuration.
 */
inline RunConfig parse_run_config(const Json& doc, const std::filesystem::path& base_dir = {}) {
  if (doc.is_object() && doc.contains("config") && doc.contains("pairs")) return parse_run_config(doc.at("config"), base_dir);
  detail::Reader r(doc, "");
  RunConfig cfg;
  cfg.seed = r.unsigned_integer("seed", 0);
  cfg.rate_hz = r.number("rate_hz", cfg.rate_hz);
  if (!(cfg.rate_hz > 0.0) || !std::isfinite(cfg.rate_hz)) r.fail("rate_hz must be positive");
  cfg.output_dir = r.string("output_dir", cfg.output_dir);

  if (r.has("domain")) {
    detail::Reader d(r.raw("domain"), "domain");
    if (d.has("x")) cfg.domain.x_spec = detail::parse_histogram(detail::Reader(d.raw("x"), "domain.x"));
    if (d.has("y")) cfg.domain.y_spec = detail::parse_histogram(detail::Reader(d.raw("y"), "domain.y"));
    cfg.domain.base_rate_x = d.has("base_rate_x") ? d.numbers("base_rate_x") : uniform_base_rate(cfg.domain.x_spec.bins);
    cfg.domain.base_rate_y = d.has("base_rate_y") ? d.numbers("base_rate_y") : uniform_base_rate(cfg.domain.y_spec.bins);
    d.finish();
    detail::rethrow_as_config("domain", [&] {
      cfg.domain.validate();
      return 0;
    });
  }

  if (r.has("assessor")) {
    detail::Reader a(r.raw("assessor"), "assessor");
    const double st = a.number("st_length", static_cast<double>(cfg.assessor.st_length));
    if (st < 1 || st != std::floor(st)) a.fail("st_length must be an integer >= 1");
    cfg.assessor.st_length = static_cast<std::size_t>(st);
    cfg.assessor.trust_discount = a.number("trust_discount", cfg.assessor.trust_discount);
    cfg.assessor.gate_threshold = a.number("gate_threshold", cfg.assessor.gate_threshold);
    cfg.assessor.event_threshold = a.number("event_threshold", cfg.assessor.event_threshold);
    a.finish();
    detail::rethrow_as_config("assessor", [&] {
      cfg.assessor.validate();
      return 0;
    });
  }

  const Json& systems = r.array("systems");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    detail::Reader s(systems[i], "systems[" + std::to_string(i) + "]");
    SystemConfig sys;
    sys.id = s.string("id");
    if (sys.id.empty()) s.fail("id must not be empty");
    if (sys.id.find_first_of("/\\") != std::string::npos) s.fail("id must not contain path separators");
    if (!ids.insert(sys.id).second) s.fail("duplicate system id '" + sys.id + "'");
    sys.kind = detail::rethrow_as_config(s.field("kind"), [&] { return parse_kind(s.string("kind", "absolute")); });
    if (s.has("path") == s.has("synth")) s.fail("exactly one of 'path' or 'synth' is required");
    if (s.has("path")) {
      std::filesystem::path p = s.string("path");
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      sys.path = p.lexically_normal().string();
    } else {
      sys.synth = detail::parse_path(detail::Reader(s.raw("synth"), s.field("synth")));
      sys.synth_rate_hz = s.number("synth_rate_hz", cfg.rate_hz);
      if (!(sys.synth_rate_hz > 0.0)) s.fail("synth_rate_hz must be positive");
    }
    sys.faults = detail::parse_faults(s, cfg.seed, i);
    s.finish();
    cfg.systems.push_back(std::move(sys));
  }
  if (cfg.systems.size() < 2) r.fail("at least two systems are required");
  r.finish();
  return cfg;
}

inline ScenarioSpec parse_scenario(const Json& doc) {
  detail::Reader r(doc, "");
  ScenarioSpec spec;
  spec.seed = r.unsigned_integer("seed", 0);
  const double rate = r.number("rate_hz", 10.0);
  if (!(rate > 0.0) || !std::isfinite(rate)) r.fail("rate_hz must be positive");
  spec.path = detail::parse_path(detail::Reader(r.raw("path"), "path"));
  const Json& systems = r.array("systems");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    detail::Reader s(systems[i], "systems[" + std::to_string(i) + "]");
    SynthSystem sys;
    sys.id = s.string("id");
    if (sys.id.empty() || sys.id.find_first_of("/\\") != std::string::npos) s.fail("invalid system id");
    if (!ids.insert(sys.id).second) s.fail("duplicate system id '" + sys.id + "'");
    sys.kind = detail::rethrow_as_config(s.field("kind"), [&] { return parse_kind(s.string("kind", "absolute")); });
    sys.rate_hz = s.number("rate_hz", rate);
    if (!(sys.rate_hz > 0.0) || !std::isfinite(sys.rate_hz)) s.fail("rate_hz must be positive");
    sys.faults = detail::parse_faults(s, spec.seed, i);
    s.finish();
    spec.systems.push_back(std::move(sys));
  }
  if (spec.systems.empty()) r.fail("at least one system is required");
  r.finish();
  return spec;
}

inline Json to_json(const HistogramSpec& spec) {
  return Json{{"min", spec.min}, {"max", spec.max}, {"bins", spec.bins}};
}

inline Json to_json(const FaultSpec& f) {
  Json j{{"kind", std::string(to_string(f.kind))}, {"t_from", f.t_from}};
  if (f.kind != FaultKind::Jump) j["t_to"] = f.t_to;
  if (f.kind != FaultKind::Freeze) {
    j["dx"] = f.dx;
    j["dy"] = f.dy;
  }
  if (f.kind == FaultKind::Noise) j["seed"] = f.seed;
  return j;
}

inline Json to_json(const PathSpec& p) {
  return Json{{"shape", std::string(to_string(p.shape))},
              {"duration_s", p.duration_s},
              {"speed_mps", p.speed_mps},
              {"heading_deg", p.heading_deg},
              {"amplitude_m", p.amplitude_m},
              {"period_s", p.period_s},
              {"x0", p.x0},
              {"y0", p.y0}};
}

/// Full echo of a configuration, every default made explicit.
inline Json to_json(const RunConfig& cfg) {
  Json systems = Json::array();
  for (const auto& s : cfg.systems) {
    Json j{{"id", s.id}, {"kind", std::string(to_string(s.kind))}};
    if (s.synth) {
      j["synth"] = to_json(*s.synth);
      j["synth_rate_hz"] = s.synth_rate_hz;
    } else {
      j["path"] = s.path;
    }
    Json faults = Json::array();
    for (const auto& f : s.faults) faults.push_back(to_json(f));
    j["faults"] = std::move(faults);
    systems.push_back(std::move(j));
  }
  return Json{{"seed", cfg.seed},
              {"rate_hz", cfg.rate_hz},
              {"output_dir", cfg.output_dir},
              {"domain",
               {{"x", to_json(cfg.domain.x_spec)},
                {"y", to_json(cfg.domain.y_spec)},
                {"base_rate_x", cfg.domain.base_rate_x},
                {"base_rate_y", cfg.domain.base_rate_y}}},
              {"assessor",
               {{"st_length", cfg.assessor.st_length},
                {"trust_discount", cfg.assessor.trust_discount},
                {"gate_threshold", cfg.assessor.gate_threshold},
                {"event_threshold", cfg.assessor.event_threshold}}},
              {"systems", std::move(systems)}};
}

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

}  // namespace slmon
