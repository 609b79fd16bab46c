#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "slmon/operators.hpp"

namespace slmon {

struct AssessorParams {
  std::size_t st_length = 10;
  double trust_discount = 0.99;
  double gate_threshold = 0.1;
  double event_threshold = 0.01;

  void validate() const {
    auto unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
    if (st_length < 1) throw Error(ErrorCode::ConfigError, "st_length must be at least 1");
    if (!unit(trust_discount)) throw Error(ErrorCode::ConfigError, "trust_discount must lie in [0,1]");
    if (!unit(gate_threshold)) throw Error(ErrorCode::ConfigError, "gate_threshold must lie in [0,1]");
    if (!unit(event_threshold)) throw Error(ErrorCode::ConfigError, "event_threshold must lie in [0,1]");
  }
};

/**
 * Short-term and long-term window of one localization system.
 *
 * The short-term opinion is the cumulative fusion of exactly the inputs held
 * in `st_queue` (oldest first). Inputs evicted from the short-term window are
 * fused into the long-term opinion, which is trust-discounted on every
 * eviction.
 */
struct WindowState {
  Opinion st_opinion;
  std::deque<Opinion> st_queue;
  Opinion lt_opinion;

  static WindowState fresh(const std::vector<double>& joint_base_rate) {
    const Opinion vacuous = Opinion::vacuous(joint_base_rate);
    return WindowState{vacuous, {}, vacuous};
  }

  std::size_t st_count() const noexcept { return st_queue.size(); }
};

/// Advances `state` by one input and returns the behavior opinion for this
/// step. The state is left untouched if an operator throws.
inline Opinion update_window(WindowState& state, const Opinion& input, const AssessorParams& params) {
  if (input.dimension() != state.st_opinion.dimension()) {
    throw Error(ErrorCode::DomainMismatch, "input has " + std::to_string(input.dimension()) +
                                               " states, window has " + std::to_string(state.st_opinion.dimension()));
  }
  Opinion fused = [&] {
    try {
      return cumulative_fuse(state.st_opinion, input);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::BaseRateMismatch) throw Error(ErrorCode::DomainMismatch, e.what());
      throw;
    }
  }();

  Opinion st = std::move(fused);
  Opinion lt = state.lt_opinion;
  const bool evict = state.st_queue.size() >= params.st_length;
  if (evict) {
    const Opinion& oldest = state.st_queue.front();
    st = cumulative_unfuse(st, oldest);
    lt = cumulative_fuse(trust_discount(lt, params.trust_discount), oldest);
  }

  Opinion behavior = degree_of_conflict(st, lt) > params.gate_threshold ? st : cumulative_fuse(st, lt);

  if (evict) state.st_queue.pop_front();
  state.st_queue.push_back(input);
  state.st_opinion = std::move(st);
  state.lt_opinion = std::move(lt);
  return behavior;
}

struct Comparison {
  double delta = 0.0;
  double uncertainty = 0.0;
};

/// Compares a system's behavior opinion against a reference system's.
inline Comparison compare(const Opinion& behavior, const Opinion& reference_behavior) {
  if (behavior.dimension() != reference_behavior.dimension()) {
    throw Error(ErrorCode::DomainMismatch, "behavior opinions live on different domains");
  }
  return {degree_of_conflict(behavior, reference_behavior), behavior.uncertainty()};
}

struct AssessmentRecord {
  std::size_t step = 0;
  std::string system;
  std::string reference;
  double delta = 0.0;
  double uncertainty = 0.0;
  bool flagged = false;
};

/**
 * Cross-validates a fixed set of localization systems. Each step updates
 * every system's window once and emits one record per ordered pair
 * (system, reference), system-major in configuration order.
 */
class Assessor {
public:
  Assessor(std::vector<std::string> system_ids, std::vector<double> joint_base_rate, AssessorParams params)
      : ids_(std::move(system_ids)), params_(params) {
    params_.validate();
    if (ids_.size() < 2) throw Error(ErrorCode::ConfigError, "cross-validation needs at least two systems");
    for (const auto& id : ids_) {
      if (!states_.emplace(id, WindowState::fresh(joint_base_rate)).second) {
        throw Error(ErrorCode::ConfigError, "duplicate system id '" + id + "'");
      }
    }
  }

  const AssessorParams& params() const noexcept { return params_; }
  const std::vector<std::string>& system_ids() const noexcept { return ids_; }
  const WindowState& state(const std::string& id) const { return states_.at(id); }

  std::vector<AssessmentRecord> step(const std::map<std::string, Opinion>& inputs) {
    for (const auto& id : ids_) {
      if (!inputs.contains(id)) throw Error(ErrorCode::MissingSystem, "no input for system '" + id + "'");
    }
    std::vector<Opinion> behaviors;
    behaviors.reserve(ids_.size());
    for (const auto& id : ids_) behaviors.push_back(update_window(states_.at(id), inputs.at(id), params_));

    std::vector<AssessmentRecord> records;
    records.reserve(ids_.size() * (ids_.size() - 1));
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      for (std::size_t j = 0; j < ids_.size(); ++j) {
        if (i == j) continue;
        const Comparison c = compare(behaviors[i], behaviors[j]);
        records.push_back({step_, ids_[i], ids_[j], c.delta, c.uncertainty, c.delta > params_.event_threshold});
      }
    }
    ++step_;
    return records;
  }

private:
  std::vector<std::string> ids_;
  AssessorParams params_;
  std::map<std::string, WindowState> states_;
  std::size_t step_ = 0;
};

}  // namespace slmon
