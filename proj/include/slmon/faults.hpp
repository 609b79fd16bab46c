#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>

#include "slmon/trajectory.hpp"

namespace slmon {

enum class FaultKind { Freeze, Jump, Drift, Noise };

constexpr std::string_view to_string(FaultKind kind) {
  switch (kind) {
    case FaultKind::Freeze: return "freeze";
    case FaultKind::Jump: return "jump";
    case FaultKind::Drift: return "drift";
    case FaultKind::Noise: return "noise";
  }
  return "unknown";
}

inline FaultKind parse_fault_kind(std::string_view text) {
  if (text == "freeze") return FaultKind::Freeze;
  if (text == "jump") return FaultKind::Jump;
  if (text == "drift") return FaultKind::Drift;
  if (text == "noise") return FaultKind::Noise;
  throw Error(ErrorCode::ConfigError, "unknown fault kind '" + std::string(text) + "'");
}

/**
 * One perturbation of a trajectory.
 *
 * dx/dy mean the jump offset (jump), the drift rate in m/s (drift) or the
 * per-axis standard deviation (noise). Jumps only use t_from.
 */
struct FaultSpec {
  FaultKind kind = FaultKind::Freeze;
  double t_from = 0.0;
  double t_to = 0.0;
  double dx = 0.0;
  double dy = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void require_absolute(const Trajectory& traj, std::string_view what) {
  if (traj.kind != TrajectoryKind::Absolute) {
    throw Error(ErrorCode::RelativeKindUnsupported, traj.system_id + ": " + std::string(what) +
                                                        " needs an absolute trajectory");
  }
}

inline void require_span(const Trajectory& traj, double t_from, double t_to) {
  if (!std::isfinite(t_from) || !std::isfinite(t_to) || t_to < t_from) {
    throw Error(ErrorCode::OutOfRange, traj.system_id + ": invalid fault span [" + std::to_string(t_from) + ", " +
                                           std::to_string(t_to) + ")");
  }
  if (t_from < traj.t_first() - kTimeEpsilon || t_from > traj.t_last() + kTimeEpsilon) {
    throw Error(ErrorCode::OutOfRange, traj.system_id + ": fault start " + std::to_string(t_from) +
                                           " outside the trajectory");
  }
}

inline bool in_span(double t, double t_from, double t_to) {
  return t >= t_from - kTimeEpsilon && t < t_to - kTimeEpsilon;
}

}  // namespace detail

/// Holds the position at t_from over [t_from, t_to); later samples resume
/// the original series, which produces a jump at t_to.
inline Trajectory inject_freeze(Trajectory traj, double t_from, double t_to) {
  detail::require_absolute(traj, "freeze");
  detail::require_span(traj, t_from, t_to);
  const TrajectorySample held = interpolate(traj, t_from);
  for (auto& s : traj.samples) {
    if (detail::in_span(s.t, t_from, t_to)) {
      s.x = held.x;
      s.y = held.y;
    }
  }
  return traj;
}

/// Offsets every sample at or after t_at.
inline Trajectory inject_jump(Trajectory traj, double t_at, double dx, double dy) {
  detail::require_absolute(traj, "jump");
  if (!std::isfinite(t_at) || t_at < traj.t_first() - kTimeEpsilon) {
    throw Error(ErrorCode::OutOfRange, traj.system_id + ": jump time " + std::to_string(t_at) + " before the trajectory");
  }
  for (auto& s : traj.samples) {
    if (s.t >= t_at - kTimeEpsilon) {
      s.x += dx;
      s.y += dy;
    }
  }
  return traj;
}

/// Offset growing linearly at (rate_dx, rate_dy) m/s over [t_from, t_to] and
/// held afterwards.
inline Trajectory inject_drift(Trajectory traj, double t_from, double t_to, double rate_dx, double rate_dy) {
  detail::require_absolute(traj, "drift");
  detail::require_span(traj, t_from, t_to);
  for (auto& s : traj.samples) {
    if (s.t < t_from - kTimeEpsilon) continue;
    const double elapsed = std::max(0.0, std::min(s.t, t_to) - t_from);
    s.x += elapsed * rate_dx;
    s.y += elapsed * rate_dy;
  }
  return traj;
}

/// Independent zero-mean Gaussian offsets on samples in [t_from, t_to),
/// drawn from mt19937_64 seeded with `seed`.
inline Trajectory inject_noise(Trajectory traj, double t_from, double t_to, double sigma_x, double sigma_y,
                               std::uint64_t seed) {
  detail::require_span(traj, t_from, t_to);
  if (!(sigma_x >= 0.0) || !(sigma_y >= 0.0) || !std::isfinite(sigma_x) || !std::isfinite(sigma_y)) {
    throw Error(ErrorCode::ConfigError, traj.system_id + ": noise standard deviation must be finite and >= 0");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> standard(0.0, 1.0);
  for (auto& s : traj.samples) {
    if (!detail::in_span(s.t, t_from, t_to)) continue;
    const double zx = standard(rng);
    const double zy = standard(rng);
    s.x += sigma_x * zx;
    s.y += sigma_y * zy;
  }
  return traj;
}

inline Trajectory apply_fault(Trajectory traj, const FaultSpec& fault) {
  switch (fault.kind) {
    case FaultKind::Freeze: return inject_freeze(std::move(traj), fault.t_from, fault.t_to);
    case FaultKind::Jump: return inject_jump(std::move(traj), fault.t_from, fault.dx, fault.dy);
    case FaultKind::Drift: return inject_drift(std::move(traj), fault.t_from, fault.t_to, fault.dx, fault.dy);
    case FaultKind::Noise: return inject_noise(std::move(traj), fault.t_from, fault.t_to, fault.dx, fault.dy, fault.seed);
  }
  return traj;
}

/// Applies faults in list order; the order is significant.
inline Trajectory apply_faults(Trajectory traj, std::span<const FaultSpec> faults) {
  for (const auto& fault : faults) traj = apply_fault(std::move(traj), fault);
  return traj;
}

}  // namespace slmon
