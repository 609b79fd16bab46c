#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "slmon/opinion.hpp"

namespace slmon {

namespace detail {

inline void require_same_dimension(const Opinion& a, const Opinion& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "operands have " + std::to_string(a.dimension()) + " and " +
                                                  std::to_string(b.dimension()) + " states");
  }
}

inline void require_same_base_rate(const Opinion& a, const Opinion& b) {
  require_same_dimension(a, b);
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    if (std::abs(a.base_rate()[i] - b.base_rate()[i]) > kTolerance) {
      throw Error(ErrorCode::BaseRateMismatch, "operands disagree on the base rate of state " + std::to_string(i));
    }
  }
}

}  // namespace detail

/**
 * Aleatory cumulative fusion. Non-dogmatic operands are combined by adding
 * their Dirichlet evidence; the result does not depend on the prior weight.
 * A single dogmatic operand dominates, two dogmatic operands are averaged
 * with equal weight.
 */
inline Opinion cumulative_fuse(const Opinion& a, const Opinion& b) {
  detail::require_same_base_rate(a, b);
  if (a.is_dogmatic() && b.is_dogmatic()) {
    std::vector<double> belief(a.dimension());
    for (std::size_t i = 0; i < belief.size(); ++i) belief[i] = 0.5 * (a.belief()[i] + b.belief()[i]);
    return detail::assemble_opinion(std::move(belief), 0.0, {a.base_rate().begin(), a.base_rate().end()});
  }
  if (a.is_dogmatic()) return a;
  if (b.is_dogmatic()) return b;

  EvidenceView sum = to_evidence(a);
  const EvidenceView other = to_evidence(b);
  for (std::size_t i = 0; i < sum.evidence.size(); ++i) sum.evidence[i] += other.evidence[i];
  return from_evidence(sum);
}

/**
 * Cumulative unfusion: removes the evidence of `known` from `fused`, so that
 * cumulative_fuse(cumulative_unfuse(f, k), k) == f. Evidence components that
 * come out negative by no more than the tolerance (scaled by the fused
 * evidence mass) are clamped to zero; anything beyond that means `known` was
 * never part of `fused`.
 */
inline Opinion cumulative_unfuse(const Opinion& fused, const Opinion& known) {
  detail::require_same_base_rate(fused, known);
  if (fused.is_dogmatic() || known.is_dogmatic()) {
    throw Error(ErrorCode::DogmaticOpinion, "cannot unfuse dogmatic opinions");
  }
  EvidenceView diff = to_evidence(fused);
  const EvidenceView removed = to_evidence(known);
  const double slack = kTolerance * std::max(1.0, detail::sum(diff.evidence));
  for (std::size_t i = 0; i < diff.evidence.size(); ++i) {
    double r = diff.evidence[i] - removed.evidence[i];
    if (r < -slack) {
      throw Error(ErrorCode::NegativeEvidence, "state " + std::to_string(i) + " would keep evidence " +
                                                   std::to_string(r));
    }
    diff.evidence[i] = std::max(r, 0.0);
  }
  return from_evidence(diff);
}

/// Trust discount: scales every belief mass by p and moves the rest to
/// uncertainty. Discounting by p then q equals discounting by p*q.
inline Opinion trust_discount(const Opinion& op, double p) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw Error(ErrorCode::RangeViolation, "trust discount probability " + std::to_string(p) + " outside [0,1]");
  }
  std::vector<double> belief(op.belief().begin(), op.belief().end());
  for (double& b : belief) b *= p;
  const double uncertainty = 1.0 - detail::sum(belief);
  return detail::assemble_opinion(std::move(belief), uncertainty, {op.base_rate().begin(), op.base_rate().end()});
}

/**
 * Normal multiplication of opinions on independent variables X and Y.
 *
 * The joint opinion lives on k_x * k_y states ordered row-major (X index
 * major). Its base rate and projected probability are the outer products of
 * the operands'. Uncertainty is the largest value that keeps every joint
 * belief non-negative: u = min over states of P(x,y) / a(x,y), capped at 1.
 */
inline Opinion multiply(const Opinion& x_op, const Opinion& y_op) {
  const std::vector<double> px = project(x_op);
  const std::vector<double> py = project(y_op);
  const std::size_t kx = px.size();
  const std::size_t ky = py.size();

  std::vector<double> joint_p(kx * ky);
  std::vector<double> joint_a(kx * ky);
  for (std::size_t i = 0; i < kx; ++i) {
    for (std::size_t j = 0; j < ky; ++j) {
      joint_p[i * ky + j] = px[i] * py[j];
      joint_a[i * ky + j] = x_op.base_rate()[i] * y_op.base_rate()[j];
    }
  }

  double uncertainty = 1.0;
  for (std::size_t s = 0; s < joint_p.size(); ++s) {
    if (joint_a[s] > kDivisionGuard) uncertainty = std::min(uncertainty, joint_p[s] / joint_a[s]);
  }

  std::vector<double> belief(joint_p.size());
  for (std::size_t s = 0; s < belief.size(); ++s) belief[s] = std::max(0.0, joint_p[s] - joint_a[s] * uncertainty);
  return detail::assemble_opinion(std::move(belief), uncertainty, std::move(joint_a));
}

/// Projected distance: half the L1 distance between projected probabilities.
inline double projected_distance(const Opinion& a, const Opinion& b) {
  detail::require_same_dimension(a, b);
  const std::vector<double> pa = project(a);
  const std::vector<double> pb = project(b);
  double distance = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) distance += std::abs(pa[i] - pb[i]);
  return detail::clamp_unit(0.5 * distance);
}

/// Degree of conflict: projected distance times conjunctive certainty
/// (1 - u_a)(1 - u_b). Lies in [0,1] and is symmetric.
inline double degree_of_conflict(const Opinion& a, const Opinion& b) {
  const double certainty = (1.0 - a.uncertainty()) * (1.0 - b.uncertainty());
  return detail::clamp_unit(projected_distance(a, b) * certainty);
}

}  // namespace slmon
