#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gazedepth/cue.hpp"

namespace gazedepth {

// Outcome of one selection attempt.
struct TrialRecord {
  int trial_id{0};
  std::string method;  // "focusflow" or "dwell:<threshold>"
  GuidanceSetting guidance;
  std::string target;
  // From the gaze first landing on the target to its window opening.
  std::optional<double> activation_time;
  bool success{false};
  bool false_trigger{false};
  std::uint64_t seed{0};

  bool operator==(const TrialRecord&) const = default;
};

}  // namespace gazedepth
