#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gazedepth/depth_filter.hpp"
#include "gazedepth/engine.hpp"
#include "gazedepth/geometry.hpp"
#include "gazedepth/scene.hpp"

namespace gazedepth {

enum class PointingRay { cyclopean, left, right };

struct SessionOptions {
  EyeGeometry geometry;
  double filter_window_s{0.2};
  EngineConfig engine;
  int ui_decimation{6};  // one ui_state line every N frames; 0 disables
  PointingRay pointing{PointingRay::cyclopean};
};

// Gaze sample -> depth -> filter -> hit test -> engine, for one tracker stream.
// Offline replay and the socket service both drive this class, so their
// outputs are identical for identical input.
class Session {
 public:
  Session(const Scene& scene, SessionOptions options = {});

  struct Frame {
    DepthEstimate estimate;
    SmoothedDepth smoothed;
    std::optional<std::string> hit;
    StepResult step;
    bool emit_ui{false};
  };

  Frame process(const GazeSample& sample);

  // Parses one trace line and returns the serialized event lines it produces.
  // Malformed or out-of-order input yields a single error line and leaves the
  // session untouched.
  std::vector<std::string> process_line(std::string_view line);

  InteractionEngine& engine() { return engine_; }
  std::size_t frames() const { return frames_; }
  double last_timestamp() const { return last_t_; }

 private:
  std::optional<std::string> pointing_hit(const GazeSample& sample) const;

  const Scene* scene_;
  SessionOptions options_;
  DepthFilter filter_;
  InteractionEngine engine_;
  std::size_t frames_{0};
  double last_t_{0};
};

}  // namespace gazedepth
