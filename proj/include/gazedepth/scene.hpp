#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "gazedepth/cue.hpp"
#include "gazedepth/depth_filter.hpp"

namespace gazedepth {

struct InteractiveObject {
  std::string id;
  Eigen::Vector3d center{Eigen::Vector3d::Zero()};
  double radius{0.5};

  bool operator==(const InteractiveObject&) const = default;
};

enum class WindowKind { preview, safe_activation, zoom_lens };

const char* to_string(WindowKind kind);
WindowKind parse_window_kind(std::string_view text);

struct VirtualWindow {
  std::string id;
  double depth{1.0};
  double zone_near{0.25};
  double zone_far{1.75};
  double exit_margin{0.25};
  std::string content;
  WindowKind kind{WindowKind::preview};
  std::optional<double> magnification;  // zoom_lens only; stored and reported, never rendered
  std::vector<std::string> targets;     // objects this window serves; empty serves all

  bool in_zone(double d) const { return d >= zone_near && d <= zone_far; }
  bool serves(const std::string& object_id) const;
  bool operator==(const VirtualWindow&) const = default;
};

struct Layer {
  std::string id;
  double depth{1.0};
  double match_halfwidth{0.5};
  double matched_opacity{0.85};

  bool operator==(const Layer&) const = default;
};

struct LayerOpacity {
  std::string id;
  double opacity{0};

  bool operator==(const LayerOpacity&) const = default;
};

// Raised by load_scene for malformed documents and violated invariants. The
// message always names the offending field.
class SceneError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Scene {
 public:
  std::vector<InteractiveObject> objects;
  std::vector<VirtualWindow> windows;
  std::vector<Layer> layers;
  CueConfig cue;
  double max_window_depth{2.0};

  // Checks every invariant and rebuilds the id index. Throws SceneError.
  void validate();

  const InteractiveObject* find_object(std::string_view id) const;
  const VirtualWindow* find_window(std::string_view id) const;
  // First window that serves `object_id`, or null.
  const VirtualWindow* window_for(const std::string& object_id) const;
  const VirtualWindow* nearest_window() const;

  bool operator==(const Scene& other) const;

 private:
  std::unordered_map<std::string, std::size_t> object_index_;
};

Scene load_scene(std::string_view json_text);
Scene load_scene_file(const std::string& path);
std::string serialize_scene(const Scene& scene);

/// Id of the nearest object whose bounding sphere the ray meets at a
/// non-negative parameter. Tangent rays count as hits.
std::optional<std::string> hit_test(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                                    const Scene& scene);

/// Opacity of every layer for the current focus depth. Layers nearer than the
/// focus are hidden, the matched layer uses its matched_opacity and farther
/// layers render normally. Without a depth, only layers beyond the nearest
/// window are shown.
std::vector<LayerOpacity> layer_visibility(const Scene& scene, const SmoothedDepth& depth);

}  // namespace gazedepth
