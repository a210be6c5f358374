#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace gazedepth {

enum class CueMode { none, strong, weak, adaptive };
enum class CueRamp { linear, smoothstep };

const char* to_string(CueMode mode);
CueMode parse_cue_mode(std::string_view text);
const char* to_string(CueRamp ramp);
CueRamp parse_cue_ramp(std::string_view text);

struct CueConfig {
  CueMode mode{CueMode::none};
  double window_depth{1.0};
  double adaptive_range{5.0};
  double base_opacity{1.0};
  CueRamp ramp{CueRamp::linear};

  void validate() const;
  bool operator==(const CueConfig&) const = default;
};

// Per-attempt guidance emitted by the learning scheduler.
struct GuidanceSetting {
  CueMode mode{CueMode::none};
  std::optional<double> adaptive_range;  // present iff mode == adaptive

  static GuidanceSetting none() { return {}; }
  static GuidanceSetting constant(CueMode m) { return {m, std::nullopt}; }
  static GuidanceSetting adaptive(double range) { return {CueMode::adaptive, range}; }

  // "none", "strong", "weak", or "adaptive:<range>" with a round-trip number.
  std::string label() const;
  static GuidanceSetting parse(std::string_view label);

  // Scene cue with this attempt's mode and range applied.
  CueConfig apply_to(const CueConfig& base) const;

  bool operator==(const GuidanceSetting&) const = default;
};

}  // namespace gazedepth
