#pragma once

#include <optional>
#include <string_view>

#include "gazedepth/cue.hpp"
#include "gazedepth/trial.hpp"

namespace gazedepth {

enum class StrategyKind { in_stages, adaptive };
const char* to_string(StrategyKind kind);
StrategyKind parse_strategy_kind(std::string_view text);

struct InStagesPlan {
  int strong{5};
  int weak{10};
  int none{3};
};

struct AdaptivePlan {
  double start_range{5.0};
  double shrink_step{1.0};
  int attempts_per_range{3};
  double end_range{1.0};
  int none_attempts{3};

  int range_count() const;
};

struct LearningStrategy {
  StrategyKind kind{StrategyKind::in_stages};
  InStagesPlan in_stages;
  AdaptivePlan adaptive;
  // Off by default: the study used fixed attempt counts.
  bool mastery_gated{false};

  static LearningStrategy make_in_stages() { return {StrategyKind::in_stages, {}, {}, false}; }
  static LearningStrategy make_adaptive() { return {StrategyKind::adaptive, {}, {}, false}; }

  void validate() const;
  int total_attempts() const;
};

/// Guidance for the 1-based `attempt_index`. Pure in (strategy, index).
/// Throws std::out_of_range outside [1, total_attempts()].
GuidanceSetting schedule_for(const LearningStrategy& strategy, int attempt_index);

class LearningScheduler {
 public:
  explicit LearningScheduler(LearningStrategy strategy);

  bool done() const { return attempt_ > strategy_.total_attempts(); }
  int attempt_index() const { return attempt_; }
  // Setting for the attempt about to run; nullopt once done.
  std::optional<GuidanceSetting> current() const;

  // Records the outcome of the current attempt and returns the next setting,
  // or nullopt when the plan is finished. With mastery gating a failed attempt
  // is repeated. Throws std::logic_error on a finished scheduler.
  std::optional<GuidanceSetting> advance(bool success);
  std::optional<GuidanceSetting> advance(const TrialRecord& outcome) { return advance(outcome.success); }

  const LearningStrategy& strategy() const { return strategy_; }

 private:
  LearningStrategy strategy_;
  int attempt_{1};
};

}  // namespace gazedepth
