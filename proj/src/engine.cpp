#include "gazedepth/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gazedepth {

const char* to_string(EngineMode mode) {
  switch (mode) {
    case EngineMode::Idle: return "idle";
    case EngineMode::Pointing: return "pointing";
    case EngineMode::Activated: return "activated";
  }
  return "idle";
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::TargetAcquired: return "target_acquired";
    case EventKind::TargetLost: return "target_lost";
    case EventKind::WindowActivated: return "window_activated";
    case EventKind::WindowDeactivated: return "window_deactivated";
    case EventKind::FalseTrigger: return "false_trigger";
  }
  return "unknown";
}

void EngineConfig::validate() const {
  if (!(latch_timeout_s > 0)) throw std::invalid_argument("engine.latch_timeout_s: must be > 0");
  if (exit_frames < 1) throw std::invalid_argument("engine.exit_frames: must be >= 1");
}

namespace {

void check_input(const std::optional<double>& last, const FrameInput& input, const Scene& scene) {
  if (!std::isfinite(input.timestamp)) throw std::invalid_argument("step: non-finite timestamp");
  if (last && !(input.timestamp > *last))
    throw std::invalid_argument("step: out-of-order timestamp");
  if (input.hit && !scene.find_object(*input.hit))
    throw std::invalid_argument("step: unknown object id '" + *input.hit + "'");
}

// Depth is unknown or clearly beyond the activation zone of `window`.
bool looking_far(const SmoothedDepth& s, const VirtualWindow& window) {
  return !s.depth || *s.depth > window.zone_far;
}

}  // namespace

double cue_opacity(const CueConfig& cue, const SmoothedDepth& smoothed) {
  switch (cue.mode) {
    case CueMode::none: return 0.0;
    case CueMode::strong:
    case CueMode::weak: return cue.base_opacity;
    case CueMode::adaptive: break;
  }
  if (!smoothed.depth) return 0.0;
  const double d = *smoothed.depth;
  if (d <= cue.window_depth) return cue.base_opacity;
  if (d >= cue.window_depth + cue.adaptive_range) return 0.0;
  double u = 1.0 - (d - cue.window_depth) / cue.adaptive_range;
  if (cue.ramp == CueRamp::smoothstep) u = u * u * (3.0 - 2.0 * u);
  return std::clamp(cue.base_opacity * u, 0.0, cue.base_opacity);
}

StepResult step(const EngineState& state, const FrameInput& input, const Scene& scene,
                const EngineConfig& config, const CueConfig& cue,
                const std::optional<std::string>& intent_target) {
  check_input(state.last_timestamp, input, scene);

  StepResult r;
  r.state = state;
  r.state.last_timestamp = input.timestamp;
  EngineState& s = r.state;
  const double t = input.timestamp;
  auto emit = [&](EventKind kind, const std::string& object, const std::string& window = {}) {
    r.events.push_back({t, kind, object, window});
  };
  auto go_idle = [&] {
    s.mode = EngineMode::Idle;
    s.latched_target.reset();
    s.latch_deadline.reset();
    s.active_window.reset();
    s.frames_in_exit_band = 0;
  };
  // Latch the object under the gaze if the depth says the user looks past the window.
  auto try_acquire = [&] {
    if (!input.hit) return;
    const VirtualWindow* w = scene.window_for(*input.hit);
    if (!w || !looking_far(input.smoothed, *w)) return;
    s.mode = EngineMode::Pointing;
    s.latched_target = *input.hit;
    s.latch_deadline = t + config.latch_timeout_s;
    s.frames_in_exit_band = 0;
    emit(EventKind::TargetAcquired, *input.hit);
  };

  switch (s.mode) {
    case EngineMode::Idle:
      try_acquire();
      break;

    case EngineMode::Pointing: {
      const std::string latched = *s.latched_target;
      if (input.hit && *input.hit != latched) {
        emit(EventKind::TargetLost, latched);
        go_idle();
        try_acquire();
        break;
      }
      if (t > *s.latch_deadline) {
        emit(EventKind::TargetLost, latched);
        go_idle();
        try_acquire();
        break;
      }
      const VirtualWindow* w = scene.window_for(latched);
      if (w && input.smoothed.depth && w->in_zone(*input.smoothed.depth)) {
        s.mode = EngineMode::Activated;
        s.active_window = w->id;
        s.latch_deadline.reset();
        s.frames_in_exit_band = 0;
        emit(EventKind::WindowActivated, latched, w->id);
        if (intent_target && *intent_target != latched) emit(EventKind::FalseTrigger, latched, w->id);
      }
      break;
    }

    case EngineMode::Activated: {
      const VirtualWindow* w = scene.find_window(*s.active_window);
      const double exit_depth = w->zone_far + w->exit_margin;
      if (input.smoothed.depth && *input.smoothed.depth > exit_depth)
        ++s.frames_in_exit_band;
      else
        s.frames_in_exit_band = 0;
      if (s.frames_in_exit_band >= config.exit_frames) {
        const std::string latched = *s.latched_target;
        emit(EventKind::WindowDeactivated, latched, w->id);
        emit(EventKind::TargetLost, latched);
        go_idle();
        try_acquire();
      }
      break;
    }
  }

  UiState& ui = r.ui;
  ui.timestamp = t;
  ui.mode = s.mode;
  ui.active_window = s.active_window;
  if (s.active_window) {
    if (const VirtualWindow* w = scene.find_window(*s.active_window)) ui.magnification = w->magnification;
  }
  ui.smoothed = input.smoothed;
  ui.layers = layer_visibility(scene, input.smoothed);
  ui.cue_mode = cue.mode;
  ui.cue_opacity = cue_opacity(cue, input.smoothed);
  ui.cue_placement = cue.mode == CueMode::none ? "none" : (cue.mode == CueMode::weak ? "margin" : "center");
  return r;
}

InteractionEngine::InteractionEngine(const Scene& scene, EngineConfig config)
    : scene_(&scene), config_(config), cue_(scene.cue) {
  config_.validate();
}

StepResult InteractionEngine::step(const FrameInput& input) {
  StepResult r = gazedepth::step(state_, input, *scene_, config_, cue_, intent_);
  state_ = r.state;
  return r;
}

DwellResult dwell_step(const DwellState& state, const FrameInput& input, double threshold_s,
                       const Scene& scene, int exit_frames,
                       const std::optional<std::string>& intent_target) {
  if (!(threshold_s > 0)) throw std::invalid_argument("dwell_step: threshold must be > 0");
  check_input(state.last_timestamp, input, scene);
  constexpr double kSlack = 1e-9;

  DwellResult r;
  r.state = state;
  DwellState& s = r.state;
  s.last_timestamp = input.timestamp;
  const double t = input.timestamp;
  auto emit = [&](EventKind kind, const std::string& object, const std::string& window = {}) {
    r.events.push_back({t, kind, object, window});
  };

  if (input.hit != s.current) {
    if (s.current && s.current != s.activated) emit(EventKind::TargetLost, *s.current);
    s.current = input.hit;
    s.on_target_since = t;
    if (s.current && s.current != s.activated) emit(EventKind::TargetAcquired, *s.current);
  }

  if (s.activated) {
    if (input.hit == s.activated)
      s.frames_off_target = 0;
    else
      ++s.frames_off_target;
    if (s.frames_off_target >= exit_frames) {
      emit(EventKind::WindowDeactivated, *s.activated, s.active_window.value_or(""));
      s.activated.reset();
      s.active_window.reset();
      s.frames_off_target = 0;
      // Dwell on whatever is under the gaze now starts from this frame.
      s.on_target_since = t;
    }
  }

  if (!s.activated && s.current && t - s.on_target_since + kSlack >= threshold_s) {
    const VirtualWindow* w = scene.window_for(*s.current);
    s.activated = s.current;
    s.active_window = w ? std::optional<std::string>(w->id) : std::nullopt;
    s.frames_off_target = 0;
    emit(EventKind::WindowActivated, *s.current, w ? w->id : std::string());
    if (intent_target && *intent_target != *s.current)
      emit(EventKind::FalseTrigger, *s.current, w ? w->id : std::string());
  }
  return r;
}

}  // namespace gazedepth
