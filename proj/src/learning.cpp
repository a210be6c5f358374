#include "gazedepth/learning.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gazedepth {

const char* to_string(StrategyKind kind) {
  return kind == StrategyKind::in_stages ? "in_stages" : "adaptive";
}

StrategyKind parse_strategy_kind(std::string_view text) {
  if (text == "in_stages") return StrategyKind::in_stages;
  if (text == "adaptive") return StrategyKind::adaptive;
  throw std::invalid_argument("unknown learning strategy '" + std::string(text) + "'");
}

int AdaptivePlan::range_count() const {
  return static_cast<int>(std::lround((start_range - end_range) / shrink_step)) + 1;
}

void LearningStrategy::validate() const {
  if (kind == StrategyKind::in_stages) {
    if (in_stages.strong < 1 || in_stages.weak < 1 || in_stages.none < 1)
      throw std::invalid_argument("in_stages plan: all counts must be positive");
    return;
  }
  const auto& a = adaptive;
  if (a.attempts_per_range < 1 || a.none_attempts < 1)
    throw std::invalid_argument("adaptive plan: all counts must be positive");
  if (!(a.end_range > 0)) throw std::invalid_argument("adaptive plan: end_range must be > 0");
  if (!(a.start_range > a.end_range))
    throw std::invalid_argument("adaptive plan: start_range must exceed end_range");
  if (!(a.shrink_step > 0)) throw std::invalid_argument("adaptive plan: shrink_step must be > 0");
  const double steps = (a.start_range - a.end_range) / a.shrink_step;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw std::invalid_argument("adaptive plan: shrink_step must reach end_range exactly");
}

int LearningStrategy::total_attempts() const {
  if (kind == StrategyKind::in_stages) return in_stages.strong + in_stages.weak + in_stages.none;
  return adaptive.range_count() * adaptive.attempts_per_range + adaptive.none_attempts;
}

GuidanceSetting schedule_for(const LearningStrategy& strategy, int attempt_index) {
  if (attempt_index < 1 || attempt_index > strategy.total_attempts())
    throw std::out_of_range("schedule_for: attempt index " + std::to_string(attempt_index) +
                            " outside [1, " + std::to_string(strategy.total_attempts()) + "]");
  const int i = attempt_index - 1;
  if (strategy.kind == StrategyKind::in_stages) {
    const auto& p = strategy.in_stages;
    if (i < p.strong) return GuidanceSetting::constant(CueMode::strong);
    if (i < p.strong + p.weak) return GuidanceSetting::constant(CueMode::weak);
    return GuidanceSetting::none();
  }
  const auto& p = strategy.adaptive;
  const int block = i / p.attempts_per_range;
  if (block >= p.range_count()) return GuidanceSetting::none();
  // Computed from the block index, not by repeated subtraction, so the last
  // block lands on end_range exactly.
  const double range = block == p.range_count() - 1 ? p.end_range : p.start_range - block * p.shrink_step;
  return GuidanceSetting::adaptive(range);
}

LearningScheduler::LearningScheduler(LearningStrategy strategy) : strategy_(strategy) {
  strategy_.validate();
}

std::optional<GuidanceSetting> LearningScheduler::current() const {
  if (done()) return std::nullopt;
  return schedule_for(strategy_, attempt_);
}

std::optional<GuidanceSetting> LearningScheduler::advance(bool success) {
  if (done()) throw std::logic_error("LearningScheduler::advance: schedule already finished");
  if (success || !strategy_.mastery_gated) ++attempt_;
  return current();
}

}  // namespace gazedepth
