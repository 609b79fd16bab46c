#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slmon/error.hpp"

namespace slmon {

/// Tolerance applied to every additivity and range check.
inline constexpr double kTolerance = 1e-9;
/// Denominators below this are treated as the corresponding limit case.
inline constexpr double kDivisionGuard = 1e-12;

namespace detail {

inline double sum(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0);
}

inline bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace detail

class Opinion;

namespace detail {
// Clamps rounding residue and renormalizes; used for operator outputs whose
// invariants hold analytically.
Opinion assemble_opinion(std::vector<double> belief, double uncertainty, std::vector<double> base_rate);
}  // namespace detail

/**
 * Multinomial subjective opinion over a domain of k >= 2 exclusive states:
 * a belief mass per state, one uncertainty mass for the whole distribution
 * and a base-rate prior. Belief plus uncertainty sum to one; so does the
 * base rate.
 *
 * Instances are immutable and always valid. Build them with make_opinion(),
 * from_evidence() or one of the operators.
 */
class Opinion {
public:
  static Opinion vacuous(std::vector<double> base_rate);

  std::size_t dimension() const noexcept { return belief_.size(); }
  std::span<const double> belief() const noexcept { return belief_; }
  double belief(std::size_t state) const { return belief_.at(state); }
  double uncertainty() const noexcept { return uncertainty_; }
  std::span<const double> base_rate() const noexcept { return base_rate_; }
  double base_rate(std::size_t state) const { return base_rate_.at(state); }

  bool is_vacuous() const noexcept { return uncertainty_ >= 1.0 - kTolerance; }
  bool is_dogmatic() const noexcept { return uncertainty_ <= kDivisionGuard; }

  friend bool operator==(const Opinion&, const Opinion&) = default;

private:
  Opinion(std::vector<double> belief, double uncertainty, std::vector<double> base_rate)
      : belief_(std::move(belief)), uncertainty_(uncertainty), base_rate_(std::move(base_rate)) {}

  friend Opinion detail::assemble_opinion(std::vector<double>, double, std::vector<double>);

  std::vector<double> belief_;
  double uncertainty_;
  std::vector<double> base_rate_;
};

inline Opinion detail::assemble_opinion(std::vector<double> belief, double uncertainty,
                                        std::vector<double> base_rate) {
  for (double& b : belief) b = std::max(b, 0.0);
  uncertainty = detail::clamp_unit(uncertainty);
  const double total = detail::sum(belief) + uncertainty;
  if (total > 0.0 && total != 1.0) {
    for (double& b : belief) b /= total;
    uncertainty /= total;
  }
  for (double& b : belief) b = detail::clamp_unit(b);
  return Opinion(std::move(belief), uncertainty, std::move(base_rate));
}

inline void validate_base_rate(std::span<const double> base_rate) {
  if (!detail::all_finite(base_rate)) {
    throw Error(ErrorCode::RangeViolation, "base rate has a non-finite component");
  }
  for (double a : base_rate) {
    if (a < -kTolerance || a > 1.0 + kTolerance) {
      throw Error(ErrorCode::RangeViolation, "base rate component " + std::to_string(a) + " outside [0,1]");
    }
  }
  const double total = detail::sum(base_rate);
  if (std::abs(total - 1.0) > kTolerance) {
    throw Error(ErrorCode::BaseRateViolation, "base rate sums to " + std::to_string(total));
  }
}

inline std::vector<double> normalized_base_rate(std::vector<double> base_rate) {
  validate_base_rate(base_rate);
  const double total = detail::sum(base_rate);
  for (double& a : base_rate) a = detail::clamp_unit(a / total);
  return base_rate;
}

/// Validating constructor. Accepts values within kTolerance of the
/// invariants and renormalizes them exactly.
inline Opinion make_opinion(std::vector<double> belief, double uncertainty, std::vector<double> base_rate) {
  if (belief.size() != base_rate.size()) {
    throw Error(ErrorCode::DimensionMismatch, "belief has " + std::to_string(belief.size()) +
                                                  " states, base rate has " + std::to_string(base_rate.size()));
  }
  if (belief.size() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "an opinion needs at least two states");
  }
  if (!detail::all_finite(belief) || !std::isfinite(uncertainty)) {
    throw Error(ErrorCode::RangeViolation, "belief or uncertainty is not finite");
  }
  for (double b : belief) {
    if (b < -kTolerance || b > 1.0 + kTolerance) {
      throw Error(ErrorCode::RangeViolation, "belief component " + std::to_string(b) + " outside [0,1]");
    }
  }
  if (uncertainty < -kTolerance || uncertainty > 1.0 + kTolerance) {
    throw Error(ErrorCode::RangeViolation, "uncertainty " + std::to_string(uncertainty) + " outside [0,1]");
  }
  const double total = detail::sum(belief) + uncertainty;
  if (std::abs(total - 1.0) > kTolerance) {
    throw Error(ErrorCode::AdditivityViolation, "belief plus uncertainty sums to " + std::to_string(total));
  }
  return detail::assemble_opinion(std::move(belief), uncertainty, normalized_base_rate(std::move(base_rate)));
}

inline Opinion Opinion::vacuous(std::vector<double> base_rate) {
  const std::size_t k = base_rate.size();
  return make_opinion(std::vector<double>(k, 0.0), 1.0, std::move(base_rate));
}

/// Uniform base rate over k states.
inline std::vector<double> uniform_base_rate(std::size_t k) {
  if (k < 2) throw Error(ErrorCode::DimensionMismatch, "a domain needs at least two states");
  return std::vector<double>(k, 1.0 / static_cast<double>(k));
}

/// Dirichlet evidence representation of an opinion.
struct EvidenceView {
  std::vector<double> evidence;
  std::vector<double> base_rate;
  double prior_weight = 0.0;
};

inline void validate(const EvidenceView& ev) {
  if (ev.evidence.size() != ev.base_rate.size()) {
    throw Error(ErrorCode::DimensionMismatch, "evidence and base rate lengths differ");
  }
  if (ev.evidence.size() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "evidence needs at least two states");
  }
  for (double r : ev.evidence) {
    if (!std::isfinite(r) || r < 0.0) {
      throw Error(ErrorCode::RangeViolation, "evidence component " + std::to_string(r) + " is not finite and >= 0");
    }
  }
  if (!std::isfinite(ev.prior_weight) || ev.prior_weight <= 0.0) {
    throw Error(ErrorCode::RangeViolation, "prior weight must be positive");
  }
  validate_base_rate(ev.base_rate);
}

/// Evidence with the usual non-informative prior weight W = k.
inline EvidenceView make_evidence(std::vector<double> evidence, std::vector<double> base_rate) {
  const auto k = static_cast<double>(evidence.size());
  EvidenceView ev{std::move(evidence), std::move(base_rate), k};
  validate(ev);
  return ev;
}

inline Opinion from_evidence(const EvidenceView& ev) {
  validate(ev);
  const double strength = ev.prior_weight + detail::sum(ev.evidence);
  std::vector<double> belief(ev.evidence.size());
  std::transform(ev.evidence.begin(), ev.evidence.end(), belief.begin(),
                 [strength](double r) { return r / strength; });
  return detail::assemble_opinion(std::move(belief), ev.prior_weight / strength,
                                  normalized_base_rate(ev.base_rate));
}

/// Inverse of from_evidence. Dogmatic opinions carry infinite evidence and
/// are refused.
inline EvidenceView to_evidence(const Opinion& op, double prior_weight) {
  if (!std::isfinite(prior_weight) || prior_weight <= 0.0) {
    throw Error(ErrorCode::RangeViolation, "prior weight must be positive");
  }
  if (op.is_dogmatic()) {
    throw Error(ErrorCode::DogmaticOpinion, "dogmatic opinion has infinite evidence");
  }
  const double scale = prior_weight / op.uncertainty();
  std::vector<double> evidence(op.dimension());
  std::transform(op.belief().begin(), op.belief().end(), evidence.begin(),
                 [scale](double b) { return b * scale; });
  return EvidenceView{std::move(evidence), {op.base_rate().begin(), op.base_rate().end()}, prior_weight};
}

inline EvidenceView to_evidence(const Opinion& op) {
  return to_evidence(op, static_cast<double>(op.dimension()));
}

/// Projected probability P(x) = b(x) + a(x) u.
inline std::vector<double> project(const Opinion& op) {
  std::vector<double> p(op.dimension());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = detail::clamp_unit(op.belief()[i] + op.base_rate()[i] * op.uncertainty());
  }
  return p;
}

/// Per-state variance of the equivalent Dirichlet distribution.
inline std::vector<double> variance(const Opinion& op, double prior_weight) {
  if (!std::isfinite(prior_weight) || prior_weight <= 0.0) {
    throw Error(ErrorCode::RangeViolation, "prior weight must be positive");
  }
  const double u = op.uncertainty();
  std::vector<double> var = project(op);
  for (double& p : var) p = std::max(0.0, p * (1.0 - p) * u / (prior_weight + u));
  return var;
}

}  // namespace slmon
