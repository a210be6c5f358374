#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gazedepth/cue.hpp"
#include "gazedepth/engine.hpp"
#include "gazedepth/learning.hpp"
#include "gazedepth/scene.hpp"
#include "gazedepth/session.hpp"
#include "gazedepth/simulator.hpp"
#include "gazedepth/stats.hpp"
#include "gazedepth/trial.hpp"

namespace gazedepth {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Method {
  enum class Kind { focusflow, dwell } kind{Kind::focusflow};
  double dwell_threshold_s{0};

  static Method focusflow() { return {}; }
  static Method dwell(double threshold_s) { return {Kind::dwell, threshold_s}; }
  // "focusflow" or "dwell:<threshold>".
  std::string label() const;
  static Method parse(const std::string& label);
};

enum class TaskKind {
  select,         // look at the target and select it
  browse_select,  // linger on distractors first, then select the target
  browse,         // linger on distractors only; any activation is a false trigger
};

struct ExperimentPlan {
  std::string scene_path;
  Scene scene;
  Method method;
  std::optional<LearningStrategy> strategy;  // learning runs: one trial = one participant
  GuidanceSetting guidance;                  // fixed guidance otherwise
  TaskKind task{TaskKind::select};
  std::string target;  // defaults to the first object
  std::string window;  // defaults to the window serving the target
  std::vector<std::string> distractors;  // defaults to every other object
  int browse_count{3};
  Interval browse_dwell_s{0.3, 1.5};
  int trials{1};
  double time_limit_s{5.0};
  HumanParams human;
  std::vector<std::uint64_t> seeds;  // explicit per-trial seeds; else derived from base_seed
  std::uint64_t base_seed{1};
  double rate_hz{120};
  SessionOptions session;
  Eigen::Vector3d rest_point{0, -1.5, 6};  // empty spot the gaze starts on
  double rest_s{0.5};

  void validate();
  std::uint64_t seed_for(int trial_index) const;
};

// Relative scene paths resolve against `base_dir`.
ExperimentPlan parse_plan(const nlohmann::json& doc, const std::string& base_dir = ".");
ExperimentPlan load_plan_file(const std::string& path);

struct TrialSpec {
  int trial_id{0};
  std::uint64_t seed{0};
  GuidanceSetting guidance;
  HumanParams human;
};

// Event log of one trial, for inspection and tests.
struct TrialLog {
  Trace trace;
  std::vector<InteractionEvent> events;
  std::optional<double> acquired_at;
};

/// Simulates one attempt and measures it. Activation time runs from the first
/// acquisition of the intended target to its window opening; success means
/// that happened within time_limit_s; false_trigger flags any activation of a
/// different object before then. Deterministic in (plan, spec).
TrialRecord run_trial(const ExperimentPlan& plan, const TrialSpec& spec, TrialLog* log = nullptr);

struct MetricsSummary {
  int trials{0};
  int successes{0};
  std::optional<double> mean_activation_s;
  std::optional<double> median_activation_s;
  std::optional<double> std_activation_s;
  double failure_rate{0};
  double false_trigger_rate{0};
  std::vector<TrialRecord> records;  // sorted by trial_id

  bool operator==(const MetricsSummary&) const = default;
};

// Order of `records` does not matter; they are sorted by trial_id first.
MetricsSummary summarize(std::vector<TrialRecord> records);

// Runs every trial (in parallel across `threads` workers; 0 = hardware
// concurrency). Errors are rethrown with the trial id attached.
MetricsSummary run_experiment(const ExperimentPlan& plan, unsigned threads = 0);

// Per-trial CSV: trial_id,method,guidance,activation_time_s,success,false_trigger,seed,target
void write_metrics_csv(std::ostream& out, const MetricsSummary& summary);
std::vector<TrialRecord> read_metrics_csv(std::istream& in);

// group,n,whisker_low,q1,median,q3,whisker_high,outliers (outliers ';'-separated)
void write_boxplot_csv(std::ostream& out, const std::map<std::string, std::vector<double>>& groups);
// group,bin_lo,bin_hi,count
void write_histogram_csv(std::ostream& out, const std::map<std::string, std::vector<stats::Bin>>& groups);

// Activation times of successful trials keyed by guidance label, in first-seen order of trial ids.
std::map<std::string, std::vector<double>> activation_times_by_guidance(const MetricsSummary& summary);

// --- depth characterization -------------------------------------------------

// Fixation and moving-target runs are blink-free, so every frame is measured.
struct PilotConfig {
  std::vector<double> target_depths{0.5, 1.0, 2.0};
  std::size_t frames_per_target{10000};
  double noise_deg{0.8};
  double rate_hz{120};
  // Moving-target task.
  double moving_near{0.5};
  double moving_far{2.5};
  double moving_period_s{4.0};
  double moving_duration_s{20.0};
  std::vector<double> crossing_levels{1.0, 1.5, 2.0};
  double histogram_lo{0}, histogram_hi{4};
  std::size_t histogram_bins{80};
};

struct TargetStats {
  double target_depth{0};
  std::size_t frames{0};
  std::size_t valid{0};
  std::size_t divergent{0};
  double mean{0};
  double std{0};
  std::vector<double> raw_depths;  // valid estimates only
  std::vector<stats::Bin> bins;
};

struct MovingFrame {
  double t{0};
  std::optional<double> raw;
  std::optional<double> smoothed;
};

struct CrossingCount {
  double level{0};
  std::size_t raw{0};
  std::size_t smoothed{0};
};

struct PilotReport {
  std::vector<TargetStats> targets;
  double threshold_depth{0};  // midpoint vergence angle between nearest and farthest target
  double misclassification_rate{0};
  std::vector<MovingFrame> moving;
  std::vector<CrossingCount> crossings;
};

PilotReport pilot_report(const Scene& scene, const HumanParams& human, std::uint64_t seed,
                         const PilotConfig& config = {}, const SessionOptions& session = {});

void write_pilot_summary_csv(std::ostream& out, const PilotReport& report);
void write_pilot_moving_csv(std::ostream& out, const PilotReport& report);

// Depth statistics of an arbitrary trace, grouped by scripted constant-depth
// segments when labels are given, else one "all" row.
// CSV: segment,target_depth,frames,valid,divergent,behind,invalid,mean_depth,std_depth
void write_trace_analysis_csv(std::ostream& out, const std::vector<GazeSample>& samples, const EyeGeometry& geom,
                              const std::vector<SegmentLabel>* segments = nullptr);

}  // namespace gazedepth
