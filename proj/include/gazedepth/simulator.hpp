#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "gazedepth/geometry.hpp"
#include "gazedepth/scene.hpp"

namespace gazedepth {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo{0};
  double hi{0};

  bool operator==(const Interval&) const = default;
};

// Synthetic observer. Ranges are sampled uniformly: the noise level once per
// trace, the vergence transition once per focal shift.
struct HumanParams {
  double ipd{0.064};
  Interval angular_noise_deg{0.5, 1.1};
  Interval vergence_transition_ms{160, 200};
  // Truncated normal: draws below the floor are redrawn.
  double decision_latency_mean_ms{500};
  double decision_latency_std_ms{150};
  double decision_latency_min_ms{100};
  double blink_rate_hz{0.25};
  double blink_duration_ms{150};
  double saccade_ms{30};
  // Fractional shrink of the latency mean per successful repetition; used by
  // the learning runs of the harness. 0 disables learning.
  double latency_decay{0};

  static HumanParams noiseless();
  void validate() const;
  bool operator==(const HumanParams&) const = default;
};

HumanParams parse_human_params(const nlohmann::json& node, const std::string& path = "human");
nlohmann::json human_params_to_json(const HumanParams& params);

namespace intent {

struct Fixate {
  Eigen::Vector3d point;
  double duration_s;
};

// Change focal depth along the current gaze direction. Without an explicit
// duration the transition time is drawn from HumanParams.
struct VergeTo {
  double depth;
  std::optional<double> duration_s;
};

struct Saccade {
  Eigen::Vector3d point;
};

// Saccade to each object in turn and linger on it.
struct Browse {
  std::vector<std::string> objects;
  Interval dwell_s;
};

// Look at the target, wait the decision latency, verge to the window, hold,
// then push the focus back out to the target.
struct ActivateWindow {
  std::string target;
  std::string window;
  double hold_s{1.0};
  bool release{true};
  double after_s{0.5};
};

// Straight-ahead target moving back and forth in depth (cosine profile).
struct Track {
  double near_depth;
  double far_depth;
  double period_s;
  double duration_s;
};

}  // namespace intent

using Intent = std::variant<intent::Fixate, intent::VergeTo, intent::Saccade, intent::Browse,
                            intent::ActivateWindow, intent::Track>;

struct IntentScript {
  Eigen::Vector3d start{0, 0, 10};
  std::vector<Intent> intents;
};

IntentScript parse_script(const nlohmann::json& node);
IntentScript load_script_file(const std::string& path);
nlohmann::json script_to_json(const IntentScript& script);

/// Vergence-angle smoothstep between two depths. Endpoints are exact and
/// profile(a, b, T, t) == profile(b, a, T, T - t).
double vergence_profile(double d_from, double d_to, double duration_s, double t, double ipd = 0.064);

// Scripted ground truth for one trace segment; consumed by analysis.
struct SegmentLabel {
  std::string kind;  // "fixate", "verge", "saccade", "browse", "decide", "hold", "track"
  double t0{0};
  double t1{0};
  std::optional<double> depth;  // set for constant-depth segments
};

struct Trace {
  std::vector<GazeSample> samples;
  std::vector<SegmentLabel> segments;
  double noise_deg{0};
  // Decision latency drawn for each ActivateWindow intent, in script order.
  std::vector<double> decision_latencies_s;
};

/// Deterministic in (script, params, scene, rate_hz, seed).
Trace generate_trace(const IntentScript& script, const HumanParams& params, const Scene& scene,
                     double rate_hz, std::uint64_t seed);

}  // namespace gazedepth
