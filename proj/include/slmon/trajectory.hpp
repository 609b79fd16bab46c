#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <iterator>
#include <locale>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "slmon/error.hpp"

namespace slmon {

/// Timestamps closer than this (seconds) are considered equal.
inline constexpr double kTimeEpsilon = 1e-9;

enum class TrajectoryKind { Absolute, Relative };

constexpr std::string_view to_string(TrajectoryKind kind) {
  return kind == TrajectoryKind::Absolute ? "absolute" : "relative";
}

inline TrajectoryKind parse_kind(std::string_view text) {
  if (text == "absolute") return TrajectoryKind::Absolute;
  if (text == "relative") return TrajectoryKind::Relative;
  throw Error(ErrorCode::ConfigError, "unknown trajectory kind '" + std::string(text) + "'");
}

/// One pose sample. For relative trajectories x/y hold the displacement
/// accumulated since the previous sample.
struct TrajectorySample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

struct Trajectory {
  std::string system_id;
  TrajectoryKind kind = TrajectoryKind::Absolute;
  std::vector<TrajectorySample> samples;

  double t_first() const { return samples.front().t; }
  double t_last() const { return samples.back().t; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct StepDelta {
  double t = 0.0;
  double dx = 0.0;
  double dy = 0.0;
};

/// Uniform time grid t_start + i / rate_hz for i in [0, steps].
struct TimeGrid {
  double rate_hz = 10.0;
  double t_start = 0.0;
  std::size_t steps = 0;

  double at(std::size_t i) const { return t_start + static_cast<double>(i) / rate_hz; }
  double t_end() const { return at(steps); }
};

inline void validate_trajectory(const Trajectory& traj) {
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.x) || !std::isfinite(s.y)) {
      throw Error(ErrorCode::NonFiniteValue, traj.system_id + ": sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(s.t > traj.samples[i - 1].t)) {
      throw Error(ErrorCode::NonMonotonicTime,
                  traj.system_id + ": timestamp " + std::to_string(s.t) + " at sample " + std::to_string(i) +
                      " does not increase");
    }
  }
  if (traj.samples.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, traj.system_id + ": need at least 2 samples, got " +
                                              std::to_string(traj.samples.size()));
  }
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline bool parse_number(std::string_view text, double& out) {
  if (text.empty()) return false;
  std::istringstream in{std::string(text)};
  in.imbue(std::locale::classic());
  in >> out;
  return !in.fail() && in.eof() && std::isfinite(out);
}

}  // namespace detail

/**
 * Reads a trajectory in CSV form: a header line (`t,x,y` for absolute,
 * `t,dx,dy` for relative trajectories) followed by one sample per line.
 * Blank lines and lines starting with '#' are ignored.
 */
inline Trajectory parse_trajectory(std::istream& in, std::string system_id, TrajectoryKind kind,
                                   std::string_view source = "<stream>") {
  const std::string expected_header = kind == TrajectoryKind::Absolute ? "t,x,y" : "t,dx,dy";
  Trajectory traj{std::move(system_id), kind, {}};
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    const std::string_view text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = detail::split_fields(text);
    auto where = [&] { return std::string(source) + " row " + std::to_string(row); };
    if (!header_seen) {
      std::string header;
      for (std::size_t i = 0; i < fields.size(); ++i) header += (i ? "," : "") + std::string(fields[i]);
      if (header != expected_header) {
        throw Error(ErrorCode::ParseError, where() + ": expected header '" + expected_header + "', got '" + header + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw Error(ErrorCode::ParseError, where() + ": expected 3 fields, got " + std::to_string(fields.size()));
    }
    TrajectorySample s;
    if (!detail::parse_number(fields[0], s.t) || !detail::parse_number(fields[1], s.x) ||
        !detail::parse_number(fields[2], s.y)) {
      throw Error(ErrorCode::ParseError, where() + ": malformed number in '" + std::string(text) + "'");
    }
    if (!traj.samples.empty() && !(s.t > traj.samples.back().t)) {
      throw Error(ErrorCode::NonMonotonicTime, where() + ": timestamp " + std::string(fields[0]) + " does not increase");
    }
    traj.samples.push_back(s);
  }
  if (traj.samples.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, std::string(source) + ": need at least 2 samples, got " +
                                              std::to_string(traj.samples.size()));
  }
  return traj;
}

inline Trajectory load_trajectory(const std::string& path, std::string system_id, TrajectoryKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return parse_trajectory(in, std::move(system_id), kind, path);
}

/// Linear interpolation of an absolute trajectory at time t (within span).
inline TrajectorySample interpolate(const Trajectory& traj, double t) {
  const auto& s = traj.samples;
  if (t < s.front().t - kTimeEpsilon || t > s.back().t + kTimeEpsilon) {
    throw Error(ErrorCode::OutOfRange, traj.system_id + ": time " + std::to_string(t) + " outside [" +
                                           std::to_string(s.front().t) + ", " + std::to_string(s.back().t) + "]");
  }
  auto upper = std::lower_bound(s.begin(), s.end(), t, [](const TrajectorySample& a, double v) { return a.t < v; });
  if (upper != s.end() && std::abs(upper->t - t) <= kTimeEpsilon) return *upper;
  if (upper != s.begin() && std::abs(std::prev(upper)->t - t) <= kTimeEpsilon) return *std::prev(upper);
  if (upper == s.begin()) return {t, s.front().x, s.front().y};
  if (upper == s.end()) return {t, s.back().x, s.back().y};
  const auto& a = *std::prev(upper);
  const auto& b = *upper;
  const double w = (t - a.t) / (b.t - a.t);
  return {t, a.x + w * (b.x - a.x), a.y + w * (b.y - a.y)};
}

/// Samples an absolute trajectory on the grid by linear interpolation.
inline Trajectory resample(const Trajectory& traj, const TimeGrid& grid) {
  if (traj.kind == TrajectoryKind::Relative) {
    throw Error(ErrorCode::RelativeKindUnsupported,
                traj.system_id + ": relative trajectories are aggregated per interval, not interpolated");
  }
  if (!(grid.rate_hz > 0.0) || !std::isfinite(grid.rate_hz)) throw Error(ErrorCode::ConfigError, "rate must be positive");
  if (grid.t_start < traj.t_first() - kTimeEpsilon || grid.t_end() > traj.t_last() + kTimeEpsilon) {
    throw Error(ErrorCode::OutOfRange, traj.system_id + ": requested span [" + std::to_string(grid.t_start) + ", " +
                                           std::to_string(grid.t_end()) + "] not covered");
  }
  Trajectory out{traj.system_id, TrajectoryKind::Absolute, {}};
  out.samples.reserve(grid.steps + 1);
  for (std::size_t i = 0; i <= grid.steps; ++i) out.samples.push_back(interpolate(traj, grid.at(i)));
  return out;
}

inline Trajectory resample(const Trajectory& traj, double rate_hz, double t_start, double t_end) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) throw Error(ErrorCode::ConfigError, "rate must be positive");
  if (!(t_end >= t_start)) throw Error(ErrorCode::OutOfRange, "t_end precedes t_start");
  const auto steps = static_cast<std::size_t>(std::floor((t_end - t_start) * rate_hz + 1e-6));
  return resample(traj, TimeGrid{rate_hz, t_start, steps});
}

/**
 * Per-step displacements. Absolute trajectories are differenced (one entry
 * per consecutive sample pair, stamped with the later time); relative
 * trajectories already hold displacements and pass through unchanged.
 */
inline std::vector<StepDelta> to_deltas(const Trajectory& traj) {
  if (traj.samples.size() < 2) {
    throw Error(ErrorCode::TooFewSamples, traj.system_id + ": need at least 2 samples for deltas");
  }
  std::vector<StepDelta> deltas;
  if (traj.kind == TrajectoryKind::Relative) {
    deltas.reserve(traj.samples.size());
    for (const auto& s : traj.samples) deltas.push_back({s.t, s.x, s.y});
    return deltas;
  }
  deltas.reserve(traj.samples.size() - 1);
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    const auto& prev = traj.samples[i - 1];
    const auto& cur = traj.samples[i];
    deltas.push_back({cur.t, cur.x - prev.x, cur.y - prev.y});
  }
  return deltas;
}

/**
 * Per-step displacements on a common grid: one entry per grid interval
 * (grid.at(i-1), grid.at(i)], stamped with the interval end. Absolute
 * trajectories are resampled first; relative trajectories sum the
 * displacements whose timestamps fall into each interval.
 */
inline std::vector<StepDelta> to_deltas(const Trajectory& traj, const TimeGrid& grid) {
  if (traj.kind == TrajectoryKind::Absolute) return to_deltas(resample(traj, grid));

  if (grid.t_start < traj.t_first() - kTimeEpsilon || grid.t_end() > traj.t_last() + kTimeEpsilon) {
    throw Error(ErrorCode::OutOfRange, traj.system_id + ": requested span not covered");
  }
  if (grid.steps < 1) throw Error(ErrorCode::TooFewSamples, traj.system_id + ": grid has no intervals");
  std::vector<StepDelta> deltas;
  deltas.reserve(grid.steps);
  auto it = std::find_if(traj.samples.begin(), traj.samples.end(),
                         [&](const TrajectorySample& s) { return s.t > grid.t_start + kTimeEpsilon; });
  for (std::size_t i = 1; i <= grid.steps; ++i) {
    const double end = grid.at(i);
    StepDelta d{end, 0.0, 0.0};
    for (; it != traj.samples.end() && it->t <= end + kTimeEpsilon; ++it) {
      d.dx += it->x;
      d.dy += it->y;
    }
    deltas.push_back(d);
  }
  return deltas;
}

/**
 * Largest grid (multiples of 1/rate_hz) contained in every trajectory's
 * time span. Throws MissingOverlap when the spans share less than one step.
 */
inline TimeGrid common_grid(const std::vector<Trajectory>& trajectories, double rate_hz) {
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz)) throw Error(ErrorCode::ConfigError, "rate must be positive");
  if (trajectories.empty()) throw Error(ErrorCode::MissingOverlap, "no trajectories");
  double first = -INFINITY;
  double last = INFINITY;
  for (const auto& traj : trajectories) {
    first = std::max(first, traj.t_first());
    last = std::min(last, traj.t_last());
  }
  const double start_tick = std::ceil(first * rate_hz - 1e-6);
  const double end_tick = std::floor(last * rate_hz + 1e-6);
  if (!(end_tick >= start_tick + 1.0)) {
    throw Error(ErrorCode::MissingOverlap, "trajectories share no common time span at " + std::to_string(rate_hz) + " Hz");
  }
  // Adding 0.0 turns a negative zero start into +0.
  return TimeGrid{rate_hz, start_tick / rate_hz + 0.0, static_cast<std::size_t>(end_tick - start_tick)};
}

}  // namespace slmon
