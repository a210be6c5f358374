#include "gazedepth/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "gazedepth/json_fields.hpp"

namespace gazedepth {

using Reader = json_fields::Reader<SceneError>;
using nlohmann::json;
using nlohmann::ordered_json;

const char* to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::preview: return "preview";
    case WindowKind::safe_activation: return "safe_activation";
    case WindowKind::zoom_lens: return "zoom_lens";
  }
  return "preview";
}

WindowKind parse_window_kind(std::string_view text) {
  if (text == "preview") return WindowKind::preview;
  if (text == "safe_activation") return WindowKind::safe_activation;
  if (text == "zoom_lens") return WindowKind::zoom_lens;
  throw std::invalid_argument("unknown window kind '" + std::string(text) + "'");
}

bool VirtualWindow::serves(const std::string& object_id) const {
  return targets.empty() || std::find(targets.begin(), targets.end(), object_id) != targets.end();
}

void Scene::validate() {
  object_index_.clear();
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string where = "objects[" + std::to_string(i) + "]";
    if (o.id.empty()) throw SceneError(where + ".id: must not be empty");
    if (!(o.radius > 0)) throw SceneError(where + ".radius: must be > 0");
    if (!o.center.allFinite()) throw SceneError(where + ".center: must be finite");
    if (!object_index_.emplace(o.id, i).second)
      throw SceneError(where + ".id: duplicate object id '" + o.id + "'");
  }

  std::unordered_set<std::string> window_ids;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    const std::string where = "windows[" + std::to_string(i) + "]";
    if (w.id.empty()) throw SceneError(where + ".id: must not be empty");
    if (!window_ids.insert(w.id).second)
      throw SceneError(where + ".id: duplicate window id '" + w.id + "'");
    if (!(w.zone_near > 0)) throw SceneError(where + ".zone_near: must be > 0");
    if (!(w.zone_near <= w.depth)) throw SceneError(where + ".zone_near: must be <= depth");
    if (!(w.depth <= w.zone_far)) throw SceneError(where + ".zone_far: must be >= depth");
    if (!(w.exit_margin >= 0)) throw SceneError(where + ".exit_margin: must be >= 0");
    if (!(w.depth <= max_window_depth))
      throw SceneError(where + ".depth: exceeds max_window_depth " + std::to_string(max_window_depth));
    if (w.magnification && !(*w.magnification > 0))
      throw SceneError(where + ".magnification: must be > 0");
    for (const auto& t : w.targets)
      if (!object_index_.count(t)) throw SceneError(where + ".targets: unknown object id '" + t + "'");
    // The window must sit at a depth where no object is present.
    for (const auto& o : objects) {
      const double d = o.center.norm();
      if (std::abs(d - w.depth) <= o.radius)
        throw SceneError(where + ".depth: coincides with the depth of object '" + o.id + "'");
    }
  }

  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const std::string where = "layers[" + std::to_string(i) + "]";
    if (l.id.empty()) throw SceneError(where + ".id: must not be empty");
    if (!(l.depth > 0)) throw SceneError(where + ".depth: must be > 0");
    if (!(l.match_halfwidth > 0)) throw SceneError(where + ".match_halfwidth: must be > 0");
    if (!(l.matched_opacity >= 0 && l.matched_opacity <= 1))
      throw SceneError(where + ".matched_opacity: must be in [0, 1]");
    if (i > 0) {
      const auto& prev = layers[i - 1];
      if (!(l.depth > prev.depth)) throw SceneError(where + ".depth: layer depths must be strictly increasing");
      if (!(prev.depth + prev.match_halfwidth < l.depth - l.match_halfwidth))
        throw SceneError(where + ".match_halfwidth: overlaps the match band of layer '" + prev.id + "'");
    }
  }

  try {
    cue.validate();
  } catch (const std::invalid_argument& e) {
    throw SceneError(e.what());
  }
}

const InteractiveObject* Scene::find_object(std::string_view id) const {
  auto it = object_index_.find(std::string(id));
  if (it != object_index_.end()) return &objects[it->second];
  // Index is rebuilt by validate(); fall back to a scan for hand-built scenes.
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const VirtualWindow* Scene::find_window(std::string_view id) const {
  for (const auto& w : windows)
    if (w.id == id) return &w;
  return nullptr;
}

const VirtualWindow* Scene::window_for(const std::string& object_id) const {
  for (const auto& w : windows)
    if (w.serves(object_id)) return &w;
  return nullptr;
}

const VirtualWindow* Scene::nearest_window() const {
  const VirtualWindow* best = nullptr;
  for (const auto& w : windows)
    if (!best || w.depth < best->depth) best = &w;
  return best;
}

bool Scene::operator==(const Scene& other) const {
  return objects == other.objects && windows == other.windows && layers == other.layers &&
         cue == other.cue && max_window_depth == other.max_window_depth;
}

namespace {

InteractiveObject parse_object(const Reader& r) {
  r.only_keys({"id", "center", "radius"});
  InteractiveObject o;
  o.id = r.string("id");
  o.center = r.vec3("center");
  o.radius = r.number("radius");
  return o;
}

VirtualWindow parse_window(const Reader& r) {
  r.only_keys({"id", "depth", "zone", "exit_margin", "content", "kind", "magnification", "targets"});
  VirtualWindow w;
  w.id = r.string("id");
  w.depth = r.number("depth");
  if (r.has("zone")) {
    const auto& z = r.array("zone");
    if (z.size() != 2 || !z[0].is_number() || !z[1].is_number())
      r.fail("zone", "expected [near, far]");
    w.zone_near = z[0].get<double>();
    w.zone_far = z[1].get<double>();
  } else {
    w.zone_near = std::max(w.depth - 0.75, w.depth * 0.25);
    w.zone_far = w.depth + 0.75;
  }
  w.exit_margin = r.number_or("exit_margin", 0.25);
  w.content = r.string_or("content", "");
  try {
    w.kind = parse_window_kind(r.string_or("kind", "preview"));
  } catch (const std::invalid_argument& e) {
    r.fail("kind", e.what());
  }
  if (r.has("magnification")) w.magnification = r.number("magnification");
  if (r.has("targets")) {
    for (const auto& t : r.array("targets")) {
      if (!t.is_string()) r.fail("targets", "expected an array of object ids");
      w.targets.push_back(t.get<std::string>());
    }
  }
  return w;
}

Layer parse_layer(const Reader& r) {
  r.only_keys({"id", "depth", "match_halfwidth", "matched_opacity"});
  Layer l;
  l.id = r.string("id");
  l.depth = r.number("depth");
  l.match_halfwidth = r.number_or("match_halfwidth", 0.5);
  l.matched_opacity = r.number_or("matched_opacity", 0.85);
  return l;
}

CueConfig parse_cue(const Reader& r, const std::vector<VirtualWindow>& windows) {
  r.only_keys({"mode", "window_depth", "adaptive_range", "base_opacity", "ramp"});
  CueConfig c;
  try {
    c.mode = parse_cue_mode(r.string_or("mode", "none"));
  } catch (const std::invalid_argument& e) {
    r.fail("mode", e.what());
  }
  try {
    c.ramp = parse_cue_ramp(r.string_or("ramp", "linear"));
  } catch (const std::invalid_argument& e) {
    r.fail("ramp", e.what());
  }
  c.window_depth = r.has("window_depth") ? r.number("window_depth")
                                         : (windows.empty() ? 1.0 : windows.front().depth);
  c.adaptive_range = r.number_or("adaptive_range", 5.0);
  c.base_opacity = r.number_or("base_opacity", 1.0);
  return c;
}

template <typename Fn>
auto parse_array(const Reader& top, std::string_view key, Fn fn) {
  std::vector<decltype(fn(top))> out;
  if (!top.has(key)) return out;
  const auto& arr = top.array(key);
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(fn(Reader{arr[i], std::string(key) + "[" + std::to_string(i) + "]"}));
  return out;
}

}  // namespace

Scene load_scene(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SceneError(std::string("scene config parse error: ") + e.what());
  }
  Reader top{doc, ""};
  top.only_keys({"objects", "windows", "layers", "cue", "max_window_depth"});

  Scene scene;
  scene.max_window_depth = top.number_or("max_window_depth", 2.0);
  scene.objects = parse_array(top, "objects", parse_object);
  scene.windows = parse_array(top, "windows", parse_window);
  scene.layers = parse_array(top, "layers", parse_layer);
  if (top.has("cue")) {
    scene.cue = parse_cue(top.child("cue"), scene.windows);
  } else if (!scene.windows.empty()) {
    scene.cue.window_depth = scene.windows.front().depth;
  }
  scene.validate();
  return scene;
}

Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("cannot read scene file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scene(ss.str());
}

std::string serialize_scene(const Scene& scene) {
  ordered_json doc;
  doc["max_window_depth"] = scene.max_window_depth;
  doc["objects"] = ordered_json::array();
  for (const auto& o : scene.objects) {
    ordered_json j;
    j["id"] = o.id;
    j["center"] = {o.center.x(), o.center.y(), o.center.z()};
    j["radius"] = o.radius;
    doc["objects"].push_back(j);
  }
  doc["windows"] = ordered_json::array();
  for (const auto& w : scene.windows) {
    ordered_json j;
    j["id"] = w.id;
    j["depth"] = w.depth;
    j["zone"] = {w.zone_near, w.zone_far};
    j["exit_margin"] = w.exit_margin;
    j["content"] = w.content;
    j["kind"] = to_string(w.kind);
    if (w.magnification) j["magnification"] = *w.magnification;
    if (!w.targets.empty()) j["targets"] = w.targets;
    doc["windows"].push_back(j);
  }
  doc["layers"] = ordered_json::array();
  for (const auto& l : scene.layers) {
    ordered_json j;
    j["id"] = l.id;
    j["depth"] = l.depth;
    j["match_halfwidth"] = l.match_halfwidth;
    j["matched_opacity"] = l.matched_opacity;
    doc["layers"].push_back(j);
  }
  ordered_json cue;
  cue["mode"] = to_string(scene.cue.mode);
  cue["window_depth"] = scene.cue.window_depth;
  cue["adaptive_range"] = scene.cue.adaptive_range;
  cue["base_opacity"] = scene.cue.base_opacity;
  cue["ramp"] = to_string(scene.cue.ramp);
  doc["cue"] = cue;
  return doc.dump(2) + "\n";
}

std::optional<std::string> hit_test(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                                    const Scene& scene) {
  const double n = dir.norm();
  if (!(n > 0) || !std::isfinite(n)) throw std::invalid_argument("hit_test: zero-norm direction");
  const Eigen::Vector3d d = dir / n;

  const InteractiveObject* best = nullptr;
  double best_t = std::numeric_limits<double>::infinity();
  for (const auto& o : scene.objects) {
    const Eigen::Vector3d oc = origin - o.center;
    const double b = d.dot(oc);
    const double c = oc.squaredNorm() - o.radius * o.radius;
    const double disc = b * b - c;
    if (disc < 0) continue;
    const double root = std::sqrt(disc);
    double t = -b - root;
    if (t < 0) t = -b + root;  // origin inside the sphere
    if (t < 0) continue;
    if (t < best_t) {
      best_t = t;
      best = &o;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

std::vector<LayerOpacity> layer_visibility(const Scene& scene, const SmoothedDepth& depth) {
  std::vector<LayerOpacity> out;
  out.reserve(scene.layers.size());
  if (!depth.depth) {
    const VirtualWindow* nearest = scene.nearest_window();
    for (const auto& l : scene.layers)
      out.push_back({l.id, (!nearest || l.depth > nearest->depth) ? 1.0 : 0.0});
    return out;
  }
  const double focus = *depth.depth;
  for (const auto& l : scene.layers) {
    double opacity = 1.0;
    if (std::abs(l.depth - focus) <= l.match_halfwidth)
      opacity = l.matched_opacity;
    else if (l.depth < focus)
      opacity = 0.0;
    out.push_back({l.id, opacity});
  }
  return out;
}

}  // namespace gazedepth
