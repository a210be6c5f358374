#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gazedepth/cue.hpp"
#include "gazedepth/depth_filter.hpp"
#include "gazedepth/scene.hpp"

namespace gazedepth {

enum class EngineMode { Idle, Pointing, Activated };
const char* to_string(EngineMode mode);

struct EngineConfig {
  double latch_timeout_s{3.0};
  int exit_frames{6};

  void validate() const;
};

struct EngineState {
  EngineMode mode{EngineMode::Idle};
  std::optional<std::string> latched_target;
  std::optional<double> latch_deadline;
  std::optional<std::string> active_window;
  int frames_in_exit_band{0};
  std::optional<double> last_timestamp;

  bool operator==(const EngineState&) const = default;
};

struct FrameInput {
  double timestamp{0};
  SmoothedDepth smoothed;
  std::optional<std::string> hit;
};

enum class EventKind { TargetAcquired, TargetLost, WindowActivated, WindowDeactivated, FalseTrigger };

// Wire names: target_acquired, target_lost, ...
const char* to_string(EventKind kind);

struct InteractionEvent {
  double timestamp{0};
  EventKind kind{EventKind::TargetAcquired};
  std::string object_id;
  std::string window_id;  // empty for target events

  bool operator==(const InteractionEvent&) const = default;
};

struct UiState {
  double timestamp{0};
  EngineMode mode{EngineMode::Idle};
  std::optional<std::string> active_window;
  std::optional<double> magnification;
  SmoothedDepth smoothed;
  std::vector<LayerOpacity> layers;
  CueMode cue_mode{CueMode::none};
  double cue_opacity{0};
  // Where a renderer would draw the cue: "center" (strong, adaptive), "margin" (weak) or "none".
  const char* cue_placement{"none"};
};

struct StepResult {
  EngineState state;
  std::vector<InteractionEvent> events;
  UiState ui;
};

/// One frame of the pointing / depth-shift state machine.
///
/// Idle -> Pointing when the gaze ray hits an object while the smoothed depth
/// is beyond the activation zone (or unknown); the object is latched until
/// `latch_timeout_s` expires. Pointing -> Activated when the smoothed depth
/// enters the zone of the latched target's window before the deadline, even if
/// the ray has left the object. Activated -> Pointing/Idle once the depth stays
/// beyond zone_far + exit_margin for `exit_frames` consecutive frames.
///
/// `intent_target` is the harness's scripted intent; an activation on any
/// other latched object also emits FalseTrigger.
///
/// Throws std::invalid_argument on out-of-order timestamps or unknown hit ids.
StepResult step(const EngineState& state, const FrameInput& input, const Scene& scene,
                const EngineConfig& config, const CueConfig& cue,
                const std::optional<std::string>& intent_target = std::nullopt);

double cue_opacity(const CueConfig& cue, const SmoothedDepth& smoothed);

// Stateful wrapper that owns the engine state and the active cue.
class InteractionEngine {
 public:
  InteractionEngine(const Scene& scene, EngineConfig config = {});

  StepResult step(const FrameInput& input);

  void set_guidance(const GuidanceSetting& guidance) { cue_ = guidance.apply_to(scene_->cue); }
  void set_cue(const CueConfig& cue) { cue_ = cue; }
  void set_intent_target(std::optional<std::string> target) { intent_ = std::move(target); }
  void reset() { state_ = {}; }

  const EngineState& state() const { return state_; }
  const CueConfig& cue() const { return cue_; }

 private:
  const Scene* scene_;
  EngineConfig config_;
  CueConfig cue_;
  EngineState state_;
  std::optional<std::string> intent_;
};

// Dwell-time selection baseline.
struct DwellState {
  std::optional<std::string> current;  // object under the gaze
  double on_target_since{0};
  std::optional<std::string> activated;  // object whose window is open
  std::optional<std::string> active_window;
  int frames_off_target{0};
  std::optional<double> last_timestamp;

  bool operator==(const DwellState&) const = default;
};

struct DwellResult {
  DwellState state;
  std::vector<InteractionEvent> events;
};

/// Activates after the gaze has stayed on one object for `threshold_s`
/// (elapsed time from the first on-target frame). Any frame on another object
/// or on nothing restarts the count. An open window closes after
/// `exit_frames` consecutive frames off its object.
DwellResult dwell_step(const DwellState& state, const FrameInput& input, double threshold_s,
                       const Scene& scene, int exit_frames = 6,
                       const std::optional<std::string>& intent_target = std::nullopt);

}  // namespace gazedepth
