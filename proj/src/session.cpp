#include "gazedepth/session.hpp"

#include <stdexcept>

#include "gazedepth/trace_io.hpp"

namespace gazedepth {

Session::Session(const Scene& scene, SessionOptions options)
    : scene_(&scene),
      options_(options),
      filter_(options.filter_window_s),
      engine_(scene, options.engine) {
  options_.geometry.validate();
  if (options_.ui_decimation < 0) throw std::invalid_argument("ui_decimation must be >= 0");
}

std::optional<std::string> Session::pointing_hit(const GazeSample& s) const {
  std::optional<Ray> ray;
  switch (options_.pointing) {
    case PointingRay::cyclopean: ray = cyclopean_ray(s); break;
    case PointingRay::left:
      if (s.left_valid && s.left_dir.norm() > 0) ray = Ray{s.left_origin, s.left_dir.normalized()};
      break;
    case PointingRay::right:
      if (s.right_valid && s.right_dir.norm() > 0) ray = Ray{s.right_origin, s.right_dir.normalized()};
      break;
  }
  if (!ray) return std::nullopt;
  return hit_test(ray->origin, ray->dir, *scene_);
}

Session::Frame Session::process(const GazeSample& sample) {
  if (frames_ > 0 && !(sample.timestamp > last_t_))
    throw std::invalid_argument("out-of-order timestamp");
  Frame f;
  f.estimate = estimate_depth(sample, options_.geometry);
  f.smoothed = filter_.push(f.estimate);
  f.hit = pointing_hit(sample);
  f.step = engine_.step({sample.timestamp, f.smoothed, f.hit});
  ++frames_;
  last_t_ = sample.timestamp;
  f.emit_ui = options_.ui_decimation > 0 && frames_ % static_cast<std::size_t>(options_.ui_decimation) == 0;
  return f;
}

std::vector<std::string> Session::process_line(std::string_view line) {
  std::vector<std::string> out;
  Frame f;
  try {
    f = process(parse_trace_line(line));
  } catch (const std::exception& e) {
    out.push_back(format_error_line(last_t_, e.what()));
    return out;
  }
  for (const auto& e : f.step.events) out.push_back(format_event_line(e));
  if (f.emit_ui) out.push_back(format_ui_state_line(f.step.ui));
  return out;
}

}  // namespace gazedepth
