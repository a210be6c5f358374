#include "gazedepth/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "gazedepth/format.hpp"
#include "gazedepth/json_fields.hpp"

namespace gazedepth {

using nlohmann::json;
using Reader = json_fields::Reader<PlanError>;

std::string Method::label() const {
  if (kind == Kind::focusflow) return "focusflow";
  return "dwell:" + format_double(dwell_threshold_s);
}

Method Method::parse(const std::string& label) {
  if (label == "focusflow") return focusflow();
  if (label.rfind("dwell:", 0) == 0) {
    const auto t = parse_double(std::string_view(label).substr(6));
    if (!t || !(*t > 0)) throw PlanError("method: dwell threshold must be a positive number, got '" + label + "'");
    return dwell(*t);
  }
  throw PlanError("method: expected 'focusflow' or 'dwell:<seconds>', got '" + label + "'");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

TaskKind parse_task(const std::string& s) {
  if (s == "select") return TaskKind::select;
  if (s == "browse_select") return TaskKind::browse_select;
  if (s == "browse") return TaskKind::browse;
  throw PlanError("task: expected select, browse_select or browse, got '" + s + "'");
}

LearningStrategy parse_strategy(const Reader& r) {
  LearningStrategy s;
  if (r.node.is_string()) {
    s.kind = parse_strategy_kind(r.node.get<std::string>());
    return s;
  }
  r.only_keys({"kind", "strong", "weak", "none", "start_range", "shrink_step", "attempts_per_range", "end_range",
               "mastery_gated"});
  s.kind = parse_strategy_kind(r.string("kind"));
  if (r.has("strong")) s.in_stages.strong = static_cast<int>(r.integer("strong"));
  if (r.has("weak")) s.in_stages.weak = static_cast<int>(r.integer("weak"));
  if (r.has("none")) {
    s.in_stages.none = static_cast<int>(r.integer("none"));
    s.adaptive.none_attempts = s.in_stages.none;
  }
  s.adaptive.start_range = r.number_or("start_range", s.adaptive.start_range);
  s.adaptive.shrink_step = r.number_or("shrink_step", s.adaptive.shrink_step);
  if (r.has("attempts_per_range")) s.adaptive.attempts_per_range = static_cast<int>(r.integer("attempts_per_range"));
  s.adaptive.end_range = r.number_or("end_range", s.adaptive.end_range);
  if (r.has("mastery_gated")) s.mastery_gated = r.boolean("mastery_gated");
  return s;
}

}  // namespace

void ExperimentPlan::validate() {
  if (trials < 1) throw PlanError("trials: must be > 0");
  if (!(time_limit_s > 0)) throw PlanError("time_limit_s: must be > 0");
  if (!(rate_hz > 0)) throw PlanError("rate_hz: must be > 0");
  if (method.kind == Method::Kind::dwell && !(method.dwell_threshold_s > 0))
    throw PlanError("method: dwell threshold must be > 0");
  if (!seeds.empty() && seeds.size() < static_cast<std::size_t>(trials))
    throw PlanError("seeds: fewer seeds than trials");
  if (strategy) strategy->validate();
  human.validate();
  session.engine.validate();
  session.geometry.validate();
  if (scene.objects.empty()) throw PlanError("scene: plan needs at least one object");
  if (target.empty()) target = scene.objects.front().id;
  if (!scene.find_object(target)) throw PlanError("target: unknown object id '" + target + "'");
  if (window.empty()) {
    const auto* w = scene.window_for(target);
    if (!w) throw PlanError("window: no window serves target '" + target + "'");
    window = w->id;
  }
  if (!scene.find_window(window)) throw PlanError("window: unknown window id '" + window + "'");
  if (distractors.empty())
    for (const auto& o : scene.objects)
      if (o.id != target) distractors.push_back(o.id);
  for (const auto& d : distractors)
    if (!scene.find_object(d)) throw PlanError("distractors: unknown object id '" + d + "'");
  if (task != TaskKind::select && distractors.empty()) throw PlanError("distractors: browsing tasks need distractors");
  if (browse_count < 1) throw PlanError("browse_count: must be > 0");
  if (!(browse_dwell_s.lo > 0 && browse_dwell_s.hi >= browse_dwell_s.lo))
    throw PlanError("browse_dwell_s: need 0 < lo <= hi");
  if (!(rest_s > 0)) throw PlanError("rest_s: must be > 0");
  const Eigen::Vector3d mid = Eigen::Vector3d::Zero();
  if (hit_test(mid, rest_point - mid, scene)) throw PlanError("rest_point: must not lie on an object");
}

std::uint64_t ExperimentPlan::seed_for(int trial_index) const {
  if (!seeds.empty()) return seeds.at(static_cast<std::size_t>(trial_index));
  return splitmix64(base_seed + static_cast<std::uint64_t>(trial_index));
}

ExperimentPlan parse_plan(const json& doc, const std::string& base_dir) {
  Reader r{doc, ""};
  r.only_keys({"scene", "method", "strategy", "guidance", "task", "target", "window", "distractors", "browse_count",
               "browse_dwell_s", "trials", "time_limit_s", "human", "seeds", "base_seed", "rate_hz",
               "filter_window_s", "max_depth", "engine", "rest_point", "rest_s"});
  ExperimentPlan plan;
  plan.scene_path = r.string("scene");
  std::filesystem::path sp(plan.scene_path);
  if (sp.is_relative()) sp = std::filesystem::path(base_dir) / sp;
  try {
    plan.scene = load_scene_file(sp.string());
  } catch (const SceneError& e) {
    throw PlanError(std::string("scene: ") + e.what());
  }
  plan.method = Method::parse(r.string_or("method", "focusflow"));
  if (r.has("strategy")) plan.strategy = parse_strategy(r.child("strategy"));
  if (r.has("guidance")) {
    try {
      plan.guidance = GuidanceSetting::parse(r.string("guidance"));
    } catch (const std::invalid_argument& e) {
      r.fail("guidance", e.what());
    }
  }
  plan.task = parse_task(r.string_or("task", "select"));
  plan.target = r.string_or("target", "");
  plan.window = r.string_or("window", "");
  if (r.has("distractors"))
    for (const auto& d : r.array("distractors")) {
      if (!d.is_string()) r.fail("distractors", "expected an array of object ids");
      plan.distractors.push_back(d.get<std::string>());
    }
  if (r.has("browse_count")) plan.browse_count = static_cast<int>(r.integer("browse_count"));
  if (r.has("browse_dwell_s")) {
    const auto& v = r.array("browse_dwell_s");
    if (v.size() != 2 || !v[0].is_number() || !v[1].is_number()) r.fail("browse_dwell_s", "expected [lo, hi]");
    plan.browse_dwell_s = {v[0].get<double>(), v[1].get<double>()};
  }
  plan.trials = static_cast<int>(r.integer("trials"));
  plan.time_limit_s = r.number_or("time_limit_s", plan.time_limit_s);
  if (r.has("human")) {
    try {
      plan.human = parse_human_params(r.at("human"), "human");
    } catch (const SimulationError& e) {
      throw PlanError(e.what());
    }
  }
  if (r.has("seeds"))
    for (const auto& s : r.array("seeds")) {
      if (!s.is_number_unsigned()) r.fail("seeds", "expected non-negative integers");
      plan.seeds.push_back(s.get<std::uint64_t>());
    }
  if (r.has("base_seed")) {
    const auto& b = r.at("base_seed");
    if (!b.is_number_unsigned()) r.fail("base_seed", "expected a non-negative integer");
    plan.base_seed = b.get<std::uint64_t>();
  }
  plan.rate_hz = r.number_or("rate_hz", plan.rate_hz);
  plan.session.filter_window_s = r.number_or("filter_window_s", plan.session.filter_window_s);
  plan.session.geometry.ipd = plan.human.ipd;
  plan.session.geometry.max_depth = r.number_or("max_depth", plan.session.geometry.max_depth);
  if (r.has("engine")) {
    Reader e = r.child("engine");
    e.only_keys({"latch_timeout_s", "exit_frames"});
    plan.session.engine.latch_timeout_s = e.number_or("latch_timeout_s", plan.session.engine.latch_timeout_s);
    if (e.has("exit_frames")) plan.session.engine.exit_frames = static_cast<int>(e.integer("exit_frames"));
  }
  if (r.has("rest_point")) plan.rest_point = r.vec3("rest_point");
  plan.rest_s = r.number_or("rest_s", plan.rest_s);
  plan.validate();
  return plan;
}

ExperimentPlan load_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PlanError("cannot read plan file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw PlanError(std::string("plan parse error: ") + e.what());
  }
  return parse_plan(doc, std::filesystem::path(path).parent_path().string());
}

namespace {

IntentScript compose_script(const ExperimentPlan& plan, std::uint64_t seed) {
  IntentScript script;
  script.start = plan.rest_point;
  script.intents.emplace_back(intent::Fixate{plan.rest_point, plan.rest_s});

  if (plan.task != TaskKind::select) {
    std::vector<std::string> pool = plan.distractors;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 7u};
    std::mt19937_64 rng(seq);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<std::string> visit;
    for (int i = 0; i < plan.browse_count; ++i) visit.push_back(pool[static_cast<std::size_t>(i) % pool.size()]);
    script.intents.emplace_back(intent::Browse{visit, plan.browse_dwell_s});
  }

  const double budget = plan.time_limit_s + 0.5;
  if (plan.task == TaskKind::browse) {
    script.intents.emplace_back(intent::Saccade{plan.rest_point});
    script.intents.emplace_back(intent::Fixate{plan.rest_point, 0.5});
  } else if (plan.method.kind == Method::Kind::focusflow) {
    script.intents.emplace_back(intent::ActivateWindow{plan.target, plan.window, budget, false, 0});
  } else {
    const auto& center = plan.scene.find_object(plan.target)->center;
    script.intents.emplace_back(intent::Saccade{center});
    script.intents.emplace_back(intent::Fixate{center, budget});
  }
  return script;
}

}  // namespace

TrialRecord run_trial(const ExperimentPlan& plan, const TrialSpec& spec, TrialLog* log) {
  TrialRecord rec;
  rec.trial_id = spec.trial_id;
  rec.method = plan.method.label();
  rec.guidance = spec.guidance;
  rec.target = plan.target;
  rec.seed = spec.seed;

  const IntentScript script = compose_script(plan, spec.seed);
  Trace trace = generate_trace(script, spec.human, plan.scene, plan.rate_hz, spec.seed);

  std::vector<InteractionEvent> events;
  if (plan.method.kind == Method::Kind::focusflow) {
    SessionOptions opts = plan.session;
    opts.ui_decimation = 0;
    Session session(plan.scene, opts);
    session.engine().set_guidance(spec.guidance);
    session.engine().set_intent_target(plan.target);
    for (const auto& s : trace.samples) {
      auto f = session.process(s);
      events.insert(events.end(), f.step.events.begin(), f.step.events.end());
    }
  } else {
    DwellState state;
    for (const auto& s : trace.samples) {
      std::optional<std::string> hit;
      if (auto ray = cyclopean_ray(s)) hit = hit_test(ray->origin, ray->dir, plan.scene);
      auto r = dwell_step(state, {s.timestamp, {}, hit}, plan.method.dwell_threshold_s, plan.scene,
                          plan.session.engine.exit_frames, plan.target);
      state = r.state;
      events.insert(events.end(), r.events.begin(), r.events.end());
    }
  }

  std::optional<double> acquired;
  std::optional<double> activated;
  for (const auto& e : events) {
    if (!acquired && e.kind == EventKind::TargetAcquired && e.object_id == plan.target) acquired = e.timestamp;
    if (acquired && !activated && e.kind == EventKind::WindowActivated && e.object_id == plan.target)
      activated = e.timestamp;
  }
  if (acquired && activated) rec.activation_time = *activated - *acquired;
  rec.success = rec.activation_time && *rec.activation_time <= plan.time_limit_s;
  for (const auto& e : events) {
    if (activated && e.timestamp > *activated) break;
    if (e.kind == EventKind::FalseTrigger) rec.false_trigger = true;
  }

  if (log) {
    log->trace = std::move(trace);
    log->events = std::move(events);
    log->acquired_at = acquired;
  }
  return rec;
}

MetricsSummary summarize(std::vector<TrialRecord> records) {
  std::sort(records.begin(), records.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return a.trial_id < b.trial_id; });
  MetricsSummary m;
  m.trials = static_cast<int>(records.size());
  std::vector<double> times;
  int false_triggers = 0;
  for (const auto& r : records) {
    if (r.success) {
      ++m.successes;
      times.push_back(*r.activation_time);
    }
    if (r.false_trigger) ++false_triggers;
  }
  if (!times.empty()) {
    m.mean_activation_s = stats::mean(times);
    m.median_activation_s = stats::median(times);
    m.std_activation_s = stats::stddev(times);
  }
  if (m.trials > 0) {
    m.failure_rate = static_cast<double>(m.trials - m.successes) / m.trials;
    m.false_trigger_rate = static_cast<double>(false_triggers) / m.trials;
  }
  m.records = std::move(records);
  return m;
}

namespace {

// One unit of parallel work: a plain trial, or a whole learning schedule.
std::vector<TrialRecord> run_unit(const ExperimentPlan& plan, int index) {
  const std::uint64_t seed = plan.seed_for(index);
  if (!plan.strategy) return {run_trial(plan, {index, seed, plan.guidance, plan.human})};

  std::vector<TrialRecord> out;
  LearningScheduler scheduler(*plan.strategy);
  const int total = plan.strategy->total_attempts();
  HumanParams human = plan.human;
  int attempt = 0;
  // Mastery-gated schedules can repeat attempts; cap the run length.
  const int cap = total * 4;
  for (auto g = scheduler.current(); g && attempt < cap; ++attempt) {
    const std::uint64_t attempt_seed = splitmix64(seed ^ (0x5bd1e995ULL * static_cast<std::uint64_t>(attempt + 1)));
    TrialRecord rec = run_trial(plan, {index * cap + attempt, attempt_seed, *g, human});
    if (rec.success) {
      human.decision_latency_mean_ms *= 1.0 - human.latency_decay;
      human.decision_latency_std_ms *= 1.0 - human.latency_decay;
    }
    g = scheduler.advance(rec);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

MetricsSummary run_experiment(const ExperimentPlan& plan, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(plan.trials));
  std::vector<std::vector<TrialRecord>> results(static_cast<std::size_t>(plan.trials));
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  std::string error_where;

  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= plan.trials) return;
      try {
        results[static_cast<std::size_t>(i)] = run_unit(plan, i);
      } catch (...) {
        std::lock_guard lock(err_mutex);
        if (!error) {
          error = std::current_exception();
          error_where = "trial " + std::to_string(i);
        }
        next = plan.trials;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      throw std::runtime_error(error_where + ": " + e.what());
    }
  }
  std::vector<TrialRecord> all;
  for (auto& r : results) all.insert(all.end(), r.begin(), r.end());
  return summarize(std::move(all));
}

void write_metrics_csv(std::ostream& out, const MetricsSummary& summary) {
  out << "trial_id,method,guidance,activation_time_s,success,false_trigger,seed,target\n";
  for (const auto& r : summary.records) {
    out << r.trial_id << ',' << r.method << ',' << r.guidance.label() << ','
        << (r.activation_time ? format_double(*r.activation_time) : std::string()) << ',' << (r.success ? 1 : 0)
        << ',' << (r.false_trigger ? 1 : 0) << ',' << r.seed << ',' << r.target << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<TrialRecord> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "trial_id,method,guidance,activation_time_s,success,false_trigger,seed,target")
    throw PlanError("metrics csv: unexpected header");
  std::vector<TrialRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    const std::string where = "metrics csv line " + std::to_string(lineno) + ": ";
    if (f.size() != 8) throw PlanError(where + "expected 8 fields");
    TrialRecord r;
    try {
      std::size_t used = 0;
      r.trial_id = std::stoi(f[0], &used);
      r.method = f[1];
      r.guidance = GuidanceSetting::parse(f[2]);
      if (!f[3].empty()) {
        const auto t = parse_double(f[3]);
        if (!t) throw PlanError("bad activation_time_s");
        r.activation_time = *t;
      }
      if (f[4] != "0" && f[4] != "1") throw PlanError("success must be 0 or 1");
      if (f[5] != "0" && f[5] != "1") throw PlanError("false_trigger must be 0 or 1");
      r.success = f[4] == "1";
      r.false_trigger = f[5] == "1";
      r.seed = std::stoull(f[6], &used);
      if (used != f[6].size()) throw PlanError("bad seed");
      r.target = f[7];
    } catch (const std::exception& e) {
      throw PlanError(where + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_boxplot_csv(std::ostream& out, const std::map<std::string, std::vector<double>>& groups) {
  out << "group,n,whisker_low,q1,median,q3,whisker_high,outliers\n";
  for (const auto& [name, values] : groups) {
    if (values.empty()) continue;
    const auto b = stats::box_plot(values);
    out << name << ',' << b.n << ',' << format_double(b.whisker_low) << ',' << format_double(b.q1) << ','
        << format_double(b.median) << ',' << format_double(b.q3) << ',' << format_double(b.whisker_high) << ',';
    for (std::size_t i = 0; i < b.outliers.size(); ++i) out << (i ? ";" : "") << format_double(b.outliers[i]);
    out << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const std::map<std::string, std::vector<stats::Bin>>& groups) {
  out << "group,bin_lo,bin_hi,count\n";
  for (const auto& [name, bins] : groups)
    for (const auto& b : bins) out << name << ',' << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count << '\n';
}

std::map<std::string, std::vector<double>> activation_times_by_guidance(const MetricsSummary& summary) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& r : summary.records)
    if (r.success) out[r.guidance.label()].push_back(*r.activation_time);
  return out;
}

PilotReport pilot_report(const Scene& scene, const HumanParams& human, std::uint64_t seed, const PilotConfig& config,
                         const SessionOptions& session) {
  PilotReport report;
  HumanParams h = human;
  h.angular_noise_deg = {config.noise_deg, config.noise_deg};
  h.blink_rate_hz = 0;
  EyeGeometry geom = session.geometry;
  geom.ipd = h.ipd;

  std::uint64_t stream = 0;
  for (double depth : config.target_depths) {
    IntentScript script;
    script.start = {0, 0, depth};
    script.intents.emplace_back(
        intent::Fixate{{0, 0, depth}, static_cast<double>(config.frames_per_target) / config.rate_hz});
    const Trace trace = generate_trace(script, h, scene, config.rate_hz, splitmix64(seed + ++stream));
    TargetStats ts;
    ts.target_depth = depth;
    for (const auto& s : trace.samples) {
      if (!s.left_valid || !s.right_valid) continue;  // blinks are not part of the distribution
      ++ts.frames;
      const auto est = estimate_depth(s, geom);
      if (est.valid())
        ts.raw_depths.push_back(*est.raw_depth);
      else if (est.status == DepthStatus::divergent)
        ++ts.divergent;
    }
    ts.valid = ts.raw_depths.size();
    if (!ts.raw_depths.empty()) {
      ts.mean = stats::mean(ts.raw_depths);
      ts.std = stats::stddev(ts.raw_depths);
    }
    ts.bins = stats::histogram(ts.raw_depths, config.histogram_lo, config.histogram_hi, config.histogram_bins);
    report.targets.push_back(std::move(ts));
  }

  if (report.targets.size() >= 2) {
    const auto near_it = std::min_element(report.targets.begin(), report.targets.end(),
                                          [](const auto& a, const auto& b) { return a.target_depth < b.target_depth; });
    const auto far_it = std::max_element(report.targets.begin(), report.targets.end(),
                                         [](const auto& a, const auto& b) { return a.target_depth < b.target_depth; });
    const double a0 = vergence_angle_for_depth(near_it->target_depth, geom);
    const double a1 = vergence_angle_for_depth(far_it->target_depth, geom);
    report.threshold_depth = depth_for_vergence_angle(0.5 * (a0 + a1), geom);
    // Divergent frames read as "far"; behind frames are errors for either class.
    std::size_t wrong = 0;
    std::size_t total = 0;
    for (double d : near_it->raw_depths) wrong += d > report.threshold_depth;
    wrong += near_it->frames - near_it->valid;
    for (double d : far_it->raw_depths) wrong += d <= report.threshold_depth;
    wrong += far_it->frames - far_it->valid - far_it->divergent;
    total = near_it->frames + far_it->frames;
    report.misclassification_rate = total ? static_cast<double>(wrong) / static_cast<double>(total) : 0;
  }

  IntentScript moving;
  moving.start = {0, 0, config.moving_near};
  moving.intents.emplace_back(
      intent::Track{config.moving_near, config.moving_far, config.moving_period_s, config.moving_duration_s});
  const Trace trace = generate_trace(moving, h, scene, config.rate_hz, splitmix64(seed + ++stream));
  DepthFilter filter(session.filter_window_s);
  std::vector<double> raw;
  std::vector<double> smooth;
  for (const auto& s : trace.samples) {
    const auto est = estimate_depth(s, geom);
    const auto sm = filter.push(est);
    report.moving.push_back({s.timestamp, est.raw_depth, sm.depth});
    if (est.raw_depth) raw.push_back(*est.raw_depth);
    if (sm.depth) smooth.push_back(*sm.depth);
  }
  for (double level : config.crossing_levels)
    report.crossings.push_back({level, stats::level_crossings(raw, level), stats::level_crossings(smooth, level)});
  return report;
}

void write_pilot_summary_csv(std::ostream& out, const PilotReport& report) {
  out << "target_depth,frames,valid,divergent,mean_depth,std_depth\n";
  for (const auto& t : report.targets)
    out << format_double(t.target_depth) << ',' << t.frames << ',' << t.valid << ',' << t.divergent << ','
        << format_double(t.mean) << ',' << format_double(t.std) << '\n';
}

void write_pilot_moving_csv(std::ostream& out, const PilotReport& report) {
  out << "t,raw_depth,smoothed_depth\n";
  for (const auto& f : report.moving)
    out << format_double(f.t) << ',' << (f.raw ? format_double(*f.raw) : "") << ','
        << (f.smoothed ? format_double(*f.smoothed) : "") << '\n';
}

void write_trace_analysis_csv(std::ostream& out, const std::vector<GazeSample>& samples, const EyeGeometry& geom,
                              const std::vector<SegmentLabel>* segments) {
  struct Group {
    std::string name;
    std::optional<double> target;
    std::size_t frames{0}, divergent{0}, behind{0}, invalid{0};
    std::vector<double> depths;
  };
  std::vector<Group> groups;
  std::vector<int> group_of_segment;
  if (segments) {
    for (const auto& seg : *segments) {
      if (seg.kind != "fixate" || !seg.depth) {
        group_of_segment.push_back(-1);
        continue;
      }
      int gi = -1;
      for (std::size_t i = 0; i < groups.size(); ++i)
        if (groups[i].target && *groups[i].target == *seg.depth) gi = static_cast<int>(i);
      if (gi < 0) {
        groups.push_back(Group{"fixate@" + format_double(*seg.depth), seg.depth, 0, 0, 0, 0, {}});
        gi = static_cast<int>(groups.size()) - 1;
      }
      group_of_segment.push_back(gi);
    }
  } else {
    groups.push_back(Group{"all", std::nullopt, 0, 0, 0, 0, {}});
  }

  std::size_t seg = 0;
  for (const auto& s : samples) {
    int gi = 0;
    if (segments) {
      while (seg + 1 < segments->size() && s.timestamp >= (*segments)[seg].t1) ++seg;
      if (segments->empty()) break;
      gi = group_of_segment[seg];
      if (gi < 0) continue;
    }
    Group& g = groups[static_cast<std::size_t>(gi)];
    ++g.frames;
    const auto est = estimate_depth(s, geom);
    switch (est.status) {
      case DepthStatus::valid: g.depths.push_back(*est.raw_depth); break;
      case DepthStatus::divergent: ++g.divergent; break;
      case DepthStatus::behind: ++g.behind; break;
      case DepthStatus::invalid_sample: ++g.invalid; break;
    }
  }

  out << "segment,target_depth,frames,valid,divergent,behind,invalid,mean_depth,std_depth\n";
  for (const auto& g : groups) {
    out << g.name << ',' << (g.target ? format_double(*g.target) : "") << ',' << g.frames << ',' << g.depths.size()
        << ',' << g.divergent << ',' << g.behind << ',' << g.invalid << ',';
    if (!g.depths.empty())
      out << format_double(stats::mean(g.depths)) << ',' << format_double(stats::stddev(g.depths));
    else
      out << ',';
    out << '\n';
  }
}

}  // namespace gazedepth
