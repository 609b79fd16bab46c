#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "slmon/faults.hpp"

namespace slmon {

enum class PathShape { Straight, Weave };

constexpr std::string_view to_string(PathShape shape) {
  return shape == PathShape::Straight ? "straight" : "weave";
}

inline PathShape parse_path_shape(std::string_view text) {
  if (text == "straight") return PathShape::Straight;
  if (text == "weave") return PathShape::Weave;
  throw Error(ErrorCode::ConfigError, "unknown path shape '" + std::string(text) + "'");
}

/**
 * Synthetic ground-truth drive in a planar frame.
 *
 * Straight: constant velocity along the heading. Weave: constant speed along
 * the heading plus a sinusoidal lateral offset of the given amplitude and
 * period, so lateral per-step displacements sweep through a range of values.
 */
struct PathSpec {
  PathShape shape = PathShape::Straight;
  double duration_s = 300.0;
  double speed_mps = 15.0;
  double heading_deg = 0.0;
  double amplitude_m = 20.0;
  double period_s = 60.0;
  double x0 = 0.0;
  double y0 = 0.0;

  void validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(duration_s) || duration_s <= 0.0) throw Error(ErrorCode::ConfigError, "path duration must be positive");
    if (!finite(speed_mps) || !finite(heading_deg) || !finite(amplitude_m) || !finite(x0) || !finite(y0)) {
      throw Error(ErrorCode::ConfigError, "path parameters must be finite");
    }
    if (shape == PathShape::Weave && (!finite(period_s) || period_s <= 0.0)) {
      throw Error(ErrorCode::ConfigError, "weave period must be positive");
    }
  }

  /// Ground-truth position at time t (seconds since the start).
  TrajectorySample position(double t) const {
    const double along = speed_mps * t;
    const double lateral =
        shape == PathShape::Weave ? amplitude_m * std::sin(2.0 * std::numbers::pi * t / period_s) : 0.0;
    const double h = heading_deg * std::numbers::pi / 180.0;
    const double c = std::cos(h);
    const double s = std::sin(h);
    return {t, x0 + c * along - s * lateral, y0 + s * along + c * lateral};
  }
};

/// Samples the ground truth at `rate_hz` over [0, duration]; the final
/// sample lands on the duration when it is a multiple of the period.
inline Trajectory sample_path(const PathSpec& path, double rate_hz, std::string system_id) {
  path.validate();
  if (!std::isfinite(rate_hz) || rate_hz <= 0.0) throw Error(ErrorCode::ConfigError, "rate must be positive");
  const auto count = static_cast<std::size_t>(std::floor(path.duration_s * rate_hz + 1e-6)) + 1;
  Trajectory traj{std::move(system_id), TrajectoryKind::Absolute, {}};
  traj.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) traj.samples.push_back(path.position(static_cast<double>(i) / rate_hz));
  return traj;
}

/// Converts an absolute trajectory into per-sample displacements (the first
/// sample carries zero displacement).
inline Trajectory to_relative(const Trajectory& absolute) {
  if (absolute.kind != TrajectoryKind::Absolute) return absolute;
  Trajectory rel{absolute.system_id, TrajectoryKind::Relative, {}};
  rel.samples.reserve(absolute.samples.size());
  for (std::size_t i = 0; i < absolute.samples.size(); ++i) {
    const auto& cur = absolute.samples[i];
    if (i == 0) {
      rel.samples.push_back({cur.t, 0.0, 0.0});
    } else {
      const auto& prev = absolute.samples[i - 1];
      rel.samples.push_back({cur.t, cur.x - prev.x, cur.y - prev.y});
    }
  }
  return rel;
}

/// One synthesized localization system: ground truth at its own rate, its
/// faults applied in order, then converted to the requested kind.
struct SynthSystem {
  std::string id;
  TrajectoryKind kind = TrajectoryKind::Absolute;
  double rate_hz = 10.0;
  std::vector<FaultSpec> faults;
};

inline Trajectory synthesize(const PathSpec& path, const SynthSystem& system) {
  Trajectory traj = apply_faults(sample_path(path, system.rate_hz, system.id), system.faults);
  return system.kind == TrajectoryKind::Relative ? to_relative(traj) : traj;
}

}  // namespace slmon
