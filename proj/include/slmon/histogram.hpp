#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "slmon/operators.hpp"

namespace slmon {

/// Evenly spaced bins over [min, max]. The two outer bins are open-ended, so
/// every finite value falls into exactly one of the `bins` bins.
struct HistogramSpec {
  double min = -5.0;
  double max = 5.0;
  std::size_t bins = 10;

  double width() const { return (max - min) / static_cast<double>(bins); }

  /// Border between bin i-1 and bin i, for i in [1, bins).
  double border(std::size_t i) const { return min + static_cast<double>(i) * width(); }

  void validate() const {
    if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
      throw Error(ErrorCode::ConfigError, "histogram range requires finite min < max");
    }
    if (bins < 2) throw Error(ErrorCode::ConfigError, "histogram needs at least two bins");
  }
};

/// Single-sample histogram: a one-hot count vector.
struct InputHistogram {
  std::vector<double> counts;
};

/// Shared joint domain: one histogram layout and base rate per axis.
struct DomainConfig {
  HistogramSpec x_spec;
  HistogramSpec y_spec;
  std::vector<double> base_rate_x;
  std::vector<double> base_rate_y;

  /// Default layout with uniform base rates.
  static DomainConfig uniform(HistogramSpec x_spec = {}, HistogramSpec y_spec = {}) {
    return {x_spec, y_spec, uniform_base_rate(x_spec.bins), uniform_base_rate(y_spec.bins)};
  }

  std::size_t joint_states() const { return x_spec.bins * y_spec.bins; }

  std::vector<double> joint_base_rate() const {
    std::vector<double> joint(joint_states());
    for (std::size_t i = 0; i < x_spec.bins; ++i) {
      for (std::size_t j = 0; j < y_spec.bins; ++j) joint[i * y_spec.bins + j] = base_rate_x[i] * base_rate_y[j];
    }
    return joint;
  }

  void validate() const {
    x_spec.validate();
    y_spec.validate();
    if (base_rate_x.size() != x_spec.bins || base_rate_y.size() != y_spec.bins) {
      throw Error(ErrorCode::ConfigError, "base rate length must equal the bin count of its axis");
    }
    try {
      validate_base_rate(base_rate_x);
      validate_base_rate(base_rate_y);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, e.what());
    }
  }
};

inline std::size_t bin_index(double value, const HistogramSpec& spec) {
  if (!std::isfinite(value)) throw Error(ErrorCode::NonFiniteValue, "cannot bin a non-finite value");
  std::size_t index = 0;
  // Compare against the same border values the spec reports rather than
  // dividing, so values sitting exactly on a border land deterministically.
  const double approx = std::floor((value - spec.min) / spec.width());
  if (approx >= static_cast<double>(spec.bins - 1)) {
    index = spec.bins - 1;
  } else if (approx >= 1.0) {
    index = static_cast<std::size_t>(approx);
  }
  while (index + 1 < spec.bins && value >= spec.border(index + 1)) ++index;
  while (index > 0 && value < spec.border(index)) --index;
  return index;
}

inline InputHistogram delta_to_histogram(double delta, const HistogramSpec& spec) {
  InputHistogram h{std::vector<double>(spec.bins, 0.0)};
  h.counts[bin_index(delta, spec)] = 1.0;
  return h;
}

/// Per-step input opinion for one localization system: one-hot evidence per
/// axis (prior weight = bin count), multiplied into the joint domain.
inline Opinion input_opinion(double dx, double dy, const DomainConfig& cfg) {
  InputHistogram hx = delta_to_histogram(dx, cfg.x_spec);
  InputHistogram hy = delta_to_histogram(dy, cfg.y_spec);
  const Opinion x_op = from_evidence(EvidenceView{std::move(hx.counts), cfg.base_rate_x,
                                                  static_cast<double>(cfg.x_spec.bins)});
  const Opinion y_op = from_evidence(EvidenceView{std::move(hy.counts), cfg.base_rate_y,
                                                  static_cast<double>(cfg.y_spec.bins)});
  return multiply(x_op, y_op);
}

}  // namespace slmon
