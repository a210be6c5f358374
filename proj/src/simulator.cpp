#include "gazedepth/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "gazedepth/json_fields.hpp"

namespace gazedepth {

using nlohmann::json;
using Reader = json_fields::Reader<SimulationError>;

HumanParams HumanParams::noiseless() {
  HumanParams p;
  p.angular_noise_deg = {0, 0};
  p.blink_rate_hz = 0;
  return p;
}

void HumanParams::validate() const {
  auto check_interval = [](const Interval& iv, const char* name, bool allow_zero) {
    if (!(iv.lo <= iv.hi)) throw SimulationError(std::string("human.") + name + ": lo must be <= hi");
    if (allow_zero ? !(iv.lo >= 0) : !(iv.lo > 0))
      throw SimulationError(std::string("human.") + name + ": must be positive");
  };
  if (!(ipd > 0)) throw SimulationError("human.ipd: must be > 0");
  check_interval(angular_noise_deg, "angular_noise_deg", true);
  check_interval(vergence_transition_ms, "vergence_transition_ms", false);
  if (!(decision_latency_mean_ms >= 0)) throw SimulationError("human.decision_latency_ms.mean: must be >= 0");
  if (!(decision_latency_std_ms >= 0)) throw SimulationError("human.decision_latency_ms.std: must be >= 0");
  if (!(decision_latency_min_ms >= 0)) throw SimulationError("human.decision_latency_ms.min: must be >= 0");
  if (!(blink_rate_hz >= 0)) throw SimulationError("human.blink_rate_hz: must be >= 0");
  if (!(blink_duration_ms > 0)) throw SimulationError("human.blink_duration_ms: must be > 0");
  if (!(saccade_ms > 0)) throw SimulationError("human.saccade_ms: must be > 0");
  if (!(latency_decay >= 0 && latency_decay < 1)) throw SimulationError("human.latency_decay: must be in [0, 1)");
}

namespace {

Interval read_interval(const Reader& r, std::string_view key, Interval fallback) {
  if (!r.has(key)) return fallback;
  const auto& v = r.at(key);
  if (v.is_number()) return {v.get<double>(), v.get<double>()};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  r.fail(key, "expected a number or [lo, hi]");
}

json interval_to_json(const Interval& iv) {
  if (iv.lo == iv.hi) return iv.lo;
  return json::array({iv.lo, iv.hi});
}

}  // namespace

HumanParams parse_human_params(const json& node, const std::string& path) {
  Reader r{node, path};
  r.only_keys({"ipd", "angular_noise_deg", "vergence_transition_ms", "decision_latency_ms", "blink_rate_hz",
               "blink_duration_ms", "saccade_ms", "latency_decay"});
  HumanParams p;
  p.ipd = r.number_or("ipd", p.ipd);
  p.angular_noise_deg = read_interval(r, "angular_noise_deg", p.angular_noise_deg);
  p.vergence_transition_ms = read_interval(r, "vergence_transition_ms", p.vergence_transition_ms);
  if (r.has("decision_latency_ms")) {
    const auto& v = r.at("decision_latency_ms");
    if (v.is_number()) {
      p.decision_latency_mean_ms = v.get<double>();
      p.decision_latency_std_ms = 0;
      p.decision_latency_min_ms = std::min(p.decision_latency_min_ms, p.decision_latency_mean_ms);
    } else {
      Reader lat = r.child("decision_latency_ms");
      lat.only_keys({"mean", "std", "min"});
      p.decision_latency_mean_ms = lat.number_or("mean", p.decision_latency_mean_ms);
      p.decision_latency_std_ms = lat.number_or("std", p.decision_latency_std_ms);
      p.decision_latency_min_ms = lat.number_or("min", p.decision_latency_min_ms);
    }
  }
  p.blink_rate_hz = r.number_or("blink_rate_hz", p.blink_rate_hz);
  p.blink_duration_ms = r.number_or("blink_duration_ms", p.blink_duration_ms);
  p.saccade_ms = r.number_or("saccade_ms", p.saccade_ms);
  p.latency_decay = r.number_or("latency_decay", p.latency_decay);
  p.validate();
  return p;
}

json human_params_to_json(const HumanParams& p) {
  json j;
  j["ipd"] = p.ipd;
  j["angular_noise_deg"] = interval_to_json(p.angular_noise_deg);
  j["vergence_transition_ms"] = interval_to_json(p.vergence_transition_ms);
  j["decision_latency_ms"] = {{"mean", p.decision_latency_mean_ms},
                              {"std", p.decision_latency_std_ms},
                              {"min", p.decision_latency_min_ms}};
  j["blink_rate_hz"] = p.blink_rate_hz;
  j["blink_duration_ms"] = p.blink_duration_ms;
  j["saccade_ms"] = p.saccade_ms;
  j["latency_decay"] = p.latency_decay;
  return j;
}

IntentScript parse_script(const json& node) {
  Reader top{node, "script"};
  top.only_keys({"start", "intents", "human"});
  IntentScript script;
  if (top.has("start")) script.start = top.vec3("start");
  const auto& arr = top.array("intents");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Reader r{arr[i], "script.intents[" + std::to_string(i) + "]"};
    const std::string type = r.string("type");
    if (type == "fixate") {
      r.only_keys({"type", "point", "duration"});
      script.intents.emplace_back(intent::Fixate{r.vec3("point"), r.number("duration")});
    } else if (type == "verge_to") {
      r.only_keys({"type", "depth", "duration"});
      intent::VergeTo v{r.number("depth"), std::nullopt};
      if (r.has("duration")) v.duration_s = r.number("duration");
      script.intents.emplace_back(v);
    } else if (type == "saccade") {
      r.only_keys({"type", "point"});
      script.intents.emplace_back(intent::Saccade{r.vec3("point")});
    } else if (type == "browse") {
      r.only_keys({"type", "objects", "dwell"});
      intent::Browse b;
      for (const auto& o : r.array("objects")) {
        if (!o.is_string()) r.fail("objects", "expected an array of object ids");
        b.objects.push_back(o.get<std::string>());
      }
      b.dwell_s = read_interval(r, "dwell", {1.0, 1.0});
      script.intents.emplace_back(b);
    } else if (type == "activate_window") {
      r.only_keys({"type", "target", "window", "hold", "release", "after"});
      intent::ActivateWindow a;
      a.target = r.string("target");
      a.window = r.string("window");
      a.hold_s = r.number_or("hold", a.hold_s);
      if (r.has("release")) a.release = r.boolean("release");
      a.after_s = r.number_or("after", a.after_s);
      script.intents.emplace_back(a);
    } else if (type == "track") {
      r.only_keys({"type", "near", "far", "period", "duration"});
      script.intents.emplace_back(
          intent::Track{r.number("near"), r.number("far"), r.number("period"), r.number("duration")});
    } else {
      r.fail("type", "unknown intent type '" + type + "'");
    }
  }
  return script;
}

IntentScript load_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SimulationError("cannot read script file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_script(json::parse(ss.str()));
  } catch (const json::parse_error& e) {
    throw SimulationError("script parse error in '" + path + "': " + e.what());
  }
}

json script_to_json(const IntentScript& script) {
  auto vec = [](const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); };
  json j;
  j["start"] = vec(script.start);
  j["intents"] = json::array();
  for (const auto& it : script.intents) {
    json e;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, intent::Fixate>) {
            e = {{"type", "fixate"}, {"point", vec(x.point)}, {"duration", x.duration_s}};
          } else if constexpr (std::is_same_v<T, intent::VergeTo>) {
            e = {{"type", "verge_to"}, {"depth", x.depth}};
            if (x.duration_s) e["duration"] = *x.duration_s;
          } else if constexpr (std::is_same_v<T, intent::Saccade>) {
            e = {{"type", "saccade"}, {"point", vec(x.point)}};
          } else if constexpr (std::is_same_v<T, intent::Browse>) {
            e = {{"type", "browse"}, {"objects", x.objects}, {"dwell", interval_to_json(x.dwell_s)}};
          } else if constexpr (std::is_same_v<T, intent::ActivateWindow>) {
            e = {{"type", "activate_window"}, {"target", x.target}, {"window", x.window},
                 {"hold", x.hold_s}, {"release", x.release}, {"after", x.after_s}};
          } else {
            e = {{"type", "track"}, {"near", x.near_depth}, {"far", x.far_depth},
                 {"period", x.period_s}, {"duration", x.duration_s}};
          }
        },
        it);
    j["intents"].push_back(e);
  }
  return j;
}

double vergence_profile(double d_from, double d_to, double duration_s, double t, double ipd) {
  if (!(duration_s > 0)) throw std::invalid_argument("vergence_profile: duration must be > 0");
  if (!(d_from > 0) || !(d_to > 0)) throw std::invalid_argument("vergence_profile: depths must be > 0");
  if (t <= 0) return d_from;
  if (t >= duration_s) return d_to;
  const EyeGeometry geom{ipd, 1e9};
  const double a0 = vergence_angle_for_depth(d_from, geom);
  const double a1 = vergence_angle_for_depth(d_to, geom);
  const double u = t / duration_s;
  const double s = u * u * (3.0 - 2.0 * u);
  return depth_for_vergence_angle(a0 + s * (a1 - a0), geom);
}

namespace {

using Eigen::Vector3d;

// Focal state: unit direction from the eye midpoint plus planar (x-z) depth.
struct Focus {
  Vector3d dir;
  double depth;
};

double planar_norm(const Vector3d& v) { return std::hypot(v.x(), v.z()); }

Focus focus_of(const Vector3d& point) {
  const double pn = planar_norm(point);
  if (!(pn > 1e-9)) throw SimulationError("focal point must not lie on the vertical axis through the eyes");
  return {point.normalized(), pn};
}

Vector3d point_of(const Focus& f) { return f.dir * (f.depth / planar_norm(f.dir)); }

Vector3d slerp(const Vector3d& a, const Vector3d& b, double s) {
  const double c = std::clamp(a.dot(b), -1.0, 1.0);
  const double omega = std::acos(c);
  if (omega < 1e-12) return a;
  const double so = std::sin(omega);
  return (std::sin((1 - s) * omega) / so * a + std::sin(s * omega) / so * b).normalized();
}

struct Segment {
  enum class Kind { hold, verge, saccade, track } kind;
  double t0, t1;
  Focus from, to;
  double near_depth{0}, far_depth{0}, period{1};
};

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
    engine_.seed(seq);
  }
  double uniform(const Interval& iv) {
    if (!(iv.hi > iv.lo)) return iv.lo;
    return std::uniform_real_distribution<double>(iv.lo, iv.hi)(engine_);
  }
  double normal(double mean, double std) {
    if (!(std > 0)) return mean;
    return std::normal_distribution<double>(mean, std)(engine_);
  }
  double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }

 private:
  std::mt19937_64 engine_;
};

enum Stream : std::uint32_t { kParams = 1, kBlinks = 2, kNoise = 3 };

class Compiler {
 public:
  Compiler(const IntentScript& script, const HumanParams& params, const Scene& scene, RngStream& rng, Trace& trace)
      : params_(params), scene_(scene), rng_(rng), trace_(trace), cur_(focus_of(script.start)) {}

  void run(const std::vector<Intent>& intents) {
    for (const auto& it : intents) std::visit([this](const auto& x) { add(x); }, it);
  }

  std::vector<Segment> segments;
  double now{0};

 private:
  const HumanParams& params_;
  const Scene& scene_;
  RngStream& rng_;
  Trace& trace_;
  Focus cur_;

  void push(Segment seg, const char* label, std::optional<double> depth = std::nullopt) {
    trace_.segments.push_back({label, seg.t0, seg.t1, depth});
    segments.push_back(seg);
    now = seg.t1;
    cur_ = seg.to;
  }

  void hold(double duration, const char* label) {
    if (!(duration > 0)) throw SimulationError(std::string(label) + ": duration must be > 0");
    push({Segment::Kind::hold, now, now + duration, cur_, cur_}, label, cur_.depth);
  }

  void verge(double depth, std::optional<double> duration) {
    if (!(depth > 0)) throw SimulationError("verge_to: depth must be > 0");
    const double d = duration ? *duration : rng_.uniform(params_.vergence_transition_ms) / 1000.0;
    if (!(d > 0)) throw SimulationError("verge_to: duration must be > 0");
    push({Segment::Kind::verge, now, now + d, cur_, {cur_.dir, depth}}, "verge");
  }

  void saccade(const Vector3d& point) {
    const double d = params_.saccade_ms / 1000.0;
    push({Segment::Kind::saccade, now, now + d, cur_, focus_of(point)}, "saccade");
  }

  const InteractiveObject& object(const std::string& id) const {
    const auto* o = scene_.find_object(id);
    if (!o) throw SimulationError("script references unknown object id '" + id + "'");
    return *o;
  }

  void add(const intent::Fixate& x) {
    cur_ = focus_of(x.point);
    hold(x.duration_s, "fixate");
  }
  void add(const intent::VergeTo& x) { verge(x.depth, x.duration_s); }
  void add(const intent::Saccade& x) { saccade(x.point); }
  void add(const intent::Browse& x) {
    for (const auto& id : x.objects) {
      saccade(object(id).center);
      hold(rng_.uniform(x.dwell_s), "browse");
    }
  }
  void add(const intent::ActivateWindow& x) {
    const auto& target = object(x.target);
    const auto* window = scene_.find_window(x.window);
    if (!window) throw SimulationError("script references unknown window id '" + x.window + "'");
    saccade(target.center);
    double latency = params_.decision_latency_mean_ms;
    if (params_.decision_latency_std_ms > 0) {
      int tries = 0;
      do {
        latency = rng_.normal(params_.decision_latency_mean_ms, params_.decision_latency_std_ms);
      } while (latency < params_.decision_latency_min_ms && ++tries < 1000);
    }
    latency = std::max(latency, params_.decision_latency_min_ms) / 1000.0;
    trace_.decision_latencies_s.push_back(latency);
    if (latency > 0) hold(latency, "decide");
    const double target_depth = cur_.depth;
    verge(window->depth, std::nullopt);
    hold(x.hold_s, "hold");
    if (x.release) {
      verge(target_depth, std::nullopt);
      if (x.after_s > 0) hold(x.after_s, "fixate");
    }
  }
  void add(const intent::Track& x) {
    if (!(x.near_depth > 0 && x.far_depth > x.near_depth))
      throw SimulationError("track: need 0 < near < far");
    if (!(x.period_s > 0) || !(x.duration_s > 0)) throw SimulationError("track: period and duration must be > 0");
    cur_ = {Vector3d::UnitZ(), x.near_depth};
    Segment seg{Segment::Kind::track, now, now + x.duration_s, cur_, cur_};
    seg.near_depth = x.near_depth;
    seg.far_depth = x.far_depth;
    seg.period = x.period_s;
    push(seg, "track");
  }
};

Focus evaluate(const Segment& s, double t, double ipd) {
  const double tau = t - s.t0;
  const double dur = s.t1 - s.t0;
  switch (s.kind) {
    case Segment::Kind::hold: return s.from;
    case Segment::Kind::verge: return {s.from.dir, vergence_profile(s.from.depth, s.to.depth, dur, tau, ipd)};
    case Segment::Kind::saccade: {
      const double u = std::clamp(tau / dur, 0.0, 1.0);
      const double sm = u * u * (3.0 - 2.0 * u);
      return {slerp(s.from.dir, s.to.dir, sm), vergence_profile(s.from.depth, s.to.depth, dur, tau, ipd)};
    }
    case Segment::Kind::track: {
      const double phase = 2.0 * std::numbers::pi * tau / s.period;
      return {s.from.dir, s.near_depth + (s.far_depth - s.near_depth) * 0.5 * (1.0 - std::cos(phase))};
    }
  }
  return s.from;
}

// Two-axis small-angle perturbation of a unit direction.
Vector3d perturb(const Vector3d& d, double sigma_axis_rad, RngStream& rng) {
  Vector3d e1 = Vector3d::UnitY().cross(d);
  if (e1.norm() < 1e-9) e1 = Vector3d::UnitX().cross(d);
  e1.normalize();
  const Vector3d e2 = d.cross(e1);
  const double a = rng.normal(0, sigma_axis_rad);
  const double b = rng.normal(0, sigma_axis_rad);
  return (d + std::tan(a) * e1 + std::tan(b) * e2).normalized();
}

}  // namespace

Trace generate_trace(const IntentScript& script, const HumanParams& params, const Scene& scene, double rate_hz,
                     std::uint64_t seed) {
  if (!(rate_hz > 0) || !std::isfinite(rate_hz)) throw SimulationError("rate_hz must be > 0");
  params.validate();
  if (script.intents.empty()) throw SimulationError("script has no intents");

  Trace trace;
  RngStream param_rng(seed, kParams);
  trace.noise_deg = param_rng.uniform(params.angular_noise_deg);
  Compiler compiler(script, params, scene, param_rng, trace);
  compiler.run(script.intents);
  const double total = compiler.now;
  if (!(total > 0)) throw SimulationError("script has zero duration");

  // Blink intervals as a Poisson process over the whole trace.
  std::vector<Interval> blinks;
  if (params.blink_rate_hz > 0) {
    RngStream blink_rng(seed, kBlinks);
    double t = blink_rng.exponential(params.blink_rate_hz);
    while (t < total) {
      blinks.push_back({t, t + params.blink_duration_ms / 1000.0});
      t = blinks.back().hi + blink_rng.exponential(params.blink_rate_hz);
    }
  }

  RngStream noise_rng(seed, kNoise);
  const double sigma_axis = trace.noise_deg * std::numbers::pi / 180.0 / std::numbers::sqrt2;
  const EyeGeometry geom{params.ipd, 1e9};
  const Vector3d lo = geom.left_origin();
  const Vector3d ro = geom.right_origin();

  const auto n = static_cast<std::size_t>(std::floor(total * rate_hz + 1e-9));
  trace.samples.reserve(n);
  std::size_t seg = 0;
  std::size_t blink = 0;
  const auto& segs = compiler.segments;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    while (seg + 1 < segs.size() && t >= segs[seg].t1) ++seg;
    const Vector3d p = point_of(evaluate(segs[seg], t, params.ipd));

    GazeSample s;
    s.timestamp = t;
    s.left_origin = lo;
    s.right_origin = ro;
    s.left_dir = (p - lo).normalized();
    s.right_dir = (p - ro).normalized();
    if (sigma_axis > 0) {
      s.left_dir = perturb(s.left_dir, sigma_axis, noise_rng);
      s.right_dir = perturb(s.right_dir, sigma_axis, noise_rng);
    }
    while (blink < blinks.size() && t >= blinks[blink].hi) ++blink;
    const bool blinking = blink < blinks.size() && t >= blinks[blink].lo;
    s.left_valid = s.right_valid = !blinking;
    if (blinking) s.left_dir = s.right_dir = Vector3d::Zero();
    trace.samples.push_back(s);
  }
  return trace;
}

}  // namespace gazedepth
