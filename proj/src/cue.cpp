#include "gazedepth/cue.hpp"

#include <stdexcept>
#include <string>

#include "gazedepth/format.hpp"

namespace gazedepth {

const char* to_string(CueMode mode) {
  switch (mode) {
    case CueMode::none: return "none";
    case CueMode::strong: return "strong";
    case CueMode::weak: return "weak";
    case CueMode::adaptive: return "adaptive";
  }
  return "none";
}

CueMode parse_cue_mode(std::string_view text) {
  if (text == "none") return CueMode::none;
  if (text == "strong") return CueMode::strong;
  if (text == "weak") return CueMode::weak;
  if (text == "adaptive") return CueMode::adaptive;
  throw std::invalid_argument("unknown cue mode '" + std::string(text) + "'");
}

const char* to_string(CueRamp ramp) {
  return ramp == CueRamp::linear ? "linear" : "smoothstep";
}

CueRamp parse_cue_ramp(std::string_view text) {
  if (text == "linear") return CueRamp::linear;
  if (text == "smoothstep") return CueRamp::smoothstep;
  throw std::invalid_argument("unknown cue ramp '" + std::string(text) + "'");
}

void CueConfig::validate() const {
  if (mode == CueMode::adaptive && !(adaptive_range > 0))
    throw std::invalid_argument("cue.adaptive_range: must be > 0 in adaptive mode");
  if (!(base_opacity > 0 && base_opacity <= 1))
    throw std::invalid_argument("cue.base_opacity: must be in (0, 1]");
  if (!(window_depth > 0)) throw std::invalid_argument("cue.window_depth: must be > 0");
}

std::string GuidanceSetting::label() const {
  if (mode == CueMode::adaptive)
    return std::string("adaptive:") + format_double(adaptive_range.value_or(0));
  return to_string(mode);
}

GuidanceSetting GuidanceSetting::parse(std::string_view label) {
  constexpr std::string_view prefix = "adaptive:";
  if (label.substr(0, prefix.size()) == prefix) {
    const auto range = parse_double(label.substr(prefix.size()));
    if (!range || !(*range > 0))
      throw std::invalid_argument("bad adaptive guidance label '" + std::string(label) + "'");
    return adaptive(*range);
  }
  const CueMode m = parse_cue_mode(label);
  if (m == CueMode::adaptive)
    throw std::invalid_argument("adaptive guidance label needs a range, e.g. adaptive:5");
  return constant(m);
}

CueConfig GuidanceSetting::apply_to(const CueConfig& base) const {
  CueConfig out = base;
  out.mode = mode;
  if (adaptive_range) out.adaptive_range = *adaptive_range;
  return out;
}

}  // namespace gazedepth
