// gazedepth command-line front end.
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gazedepth/format.hpp"
#include "gazedepth/harness.hpp"
#include "gazedepth/server.hpp"
#include "gazedepth/session.hpp"
#include "gazedepth/simulator.hpp"
#include "gazedepth/trace_io.hpp"

namespace fs = std::filesystem;
using namespace gazedepth;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("'" + path + "': " + e.what());
  }
}

// Scripts may carry an observer under "human"; --human overrides it.
HumanParams human_for(const std::string& script_path, const std::string& human_path) {
  if (!human_path.empty()) return parse_human_params(read_json(human_path), "human");
  const auto doc = read_json(script_path);
  if (doc.is_object() && doc.contains("human")) return parse_human_params(doc["human"], "human");
  return HumanParams{};
}

struct SimulateArgs {
  std::string scene, script, out, human, labels;
  std::uint64_t seed{1};
  double rate{120};
};

int cmd_simulate(const SimulateArgs& a) {
  const Scene scene = load_scene_file(a.scene);
  const IntentScript script = load_script_file(a.script);
  const HumanParams human = human_for(a.script, a.human);
  const Trace trace = generate_trace(script, human, scene, a.rate, a.seed);
  auto out = open_out(a.out);
  write_trace(out, trace.samples);
  if (!a.labels.empty()) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& s : trace.segments) {
      nlohmann::ordered_json e;
      e["kind"] = s.kind;
      e["t0"] = s.t0;
      e["t1"] = s.t1;
      if (s.depth) e["depth"] = *s.depth;
      j.push_back(e);
    }
    open_out(a.labels) << j.dump(2) << "\n";
  }
  std::cerr << "wrote " << trace.samples.size() << " samples to " << a.out << "\n";
  return 0;
}

struct ReplayArgs {
  std::string scene, trace, out;
  int decimation{6};
  double filter_window{0.2};
};

int cmd_replay(const ReplayArgs& a) {
  const Scene scene = load_scene_file(a.scene);
  SessionOptions opts;
  opts.ui_decimation = a.decimation;
  opts.filter_window_s = a.filter_window;
  Session session(scene, opts);
  std::ifstream in(a.trace);
  if (!in) throw std::runtime_error("cannot read trace '" + a.trace + "'");
  auto out = open_out(a.out);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    GazeSample s;
    try {
      s = parse_trace_line(line);
    } catch (const std::exception& e) {
      throw std::runtime_error(a.trace + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (session.frames() > 0 && !(s.timestamp > session.last_timestamp()))
      throw std::runtime_error(a.trace + ":" + std::to_string(lineno) + ": t: timestamps must be strictly increasing");
    const auto f = session.process(s);
    for (const auto& e : f.step.events) out << format_event_line(e) << '\n';
    if (f.emit_ui) out << format_ui_state_line(f.step.ui) << '\n';
  }
  return 0;
}

struct AnalyzeArgs {
  std::string trace, out, script, scene, human;
  std::uint64_t seed{1};
  double rate{120};
  double ipd{0.064};
  double max_depth{20};
};

int cmd_analyze(const AnalyzeArgs& a) {
  const auto samples = read_trace_file(a.trace);
  EyeGeometry geom{a.ipd, a.max_depth};
  geom.validate();
  auto out = open_out(a.out);
  if (a.script.empty()) {
    write_trace_analysis_csv(out, samples, geom);
    return 0;
  }
  if (a.scene.empty()) throw std::runtime_error("--script needs --scene to regenerate segment labels");
  // Segment labels come from regenerating the scripted trace with the same seed.
  const Scene scene = load_scene_file(a.scene);
  const Trace labels = generate_trace(load_script_file(a.script), human_for(a.script, a.human), scene, a.rate, a.seed);
  write_trace_analysis_csv(out, samples, geom, &labels.segments);
  return 0;
}

struct ExperimentArgs {
  std::string plan, out;
  unsigned threads{0};
  double hist_max{5};
  std::size_t hist_bins{50};
};

int cmd_experiment(const ExperimentArgs& a) {
  const ExperimentPlan plan = load_plan_file(a.plan);
  const MetricsSummary m = run_experiment(plan, a.threads);
  fs::create_directories(a.out);
  {
    auto out = open_out((fs::path(a.out) / "metrics.csv").string());
    write_metrics_csv(out, m);
  }
  const auto groups = activation_times_by_guidance(m);
  {
    auto out = open_out((fs::path(a.out) / "boxplot.csv").string());
    write_boxplot_csv(out, groups);
  }
  {
    std::map<std::string, std::vector<stats::Bin>> hist;
    for (const auto& [name, values] : groups) hist[name] = stats::histogram(values, 0, a.hist_max, a.hist_bins);
    auto out = open_out((fs::path(a.out) / "histogram.csv").string());
    write_histogram_csv(out, hist);
  }
  {
    auto out = open_out((fs::path(a.out) / "summary.csv").string());
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    out << "method,trials,successes,mean_activation_s,median_activation_s,std_activation_s,failure_rate,"
           "false_trigger_rate\n"
        << plan.method.label() << ',' << m.trials << ',' << m.successes << ',' << opt(m.mean_activation_s) << ','
        << opt(m.median_activation_s) << ',' << opt(m.std_activation_s) << ',' << format_double(m.failure_rate)
        << ',' << format_double(m.false_trigger_rate) << '\n';
  }
  char mean[32] = "n/a";
  if (m.mean_activation_s) std::snprintf(mean, sizeof(mean), "%.3f s", *m.mean_activation_s);
  std::printf("%s: %d trials, mean activation %s, failure rate %.3f, false trigger rate %.3f\n",
              plan.method.label().c_str(), m.trials, mean, m.failure_rate, m.false_trigger_rate);
  return 0;
}

struct PilotArgs {
  std::string scene, out;
  std::uint64_t seed{1};
  double noise{0.8};
  std::size_t frames{10000};
};

int cmd_pilot(const PilotArgs& a) {
  const Scene scene = load_scene_file(a.scene);
  PilotConfig cfg;
  cfg.noise_deg = a.noise;
  cfg.frames_per_target = a.frames;
  const auto report = pilot_report(scene, HumanParams{}, a.seed, cfg);
  fs::create_directories(a.out);
  {
    auto out = open_out((fs::path(a.out) / "pilot_summary.csv").string());
    write_pilot_summary_csv(out, report);
  }
  {
    auto out = open_out((fs::path(a.out) / "pilot_moving.csv").string());
    write_pilot_moving_csv(out, report);
  }
  {
    std::map<std::string, std::vector<stats::Bin>> hist;
    for (const auto& t : report.targets) hist[format_double(t.target_depth)] = t.bins;
    auto out = open_out((fs::path(a.out) / "pilot_histogram.csv").string());
    write_histogram_csv(out, hist);
  }
  std::cout << "threshold depth " << format_double(report.threshold_depth) << " m, misclassification "
            << format_double(report.misclassification_rate) << "\n";
  for (const auto& c : report.crossings)
    std::cout << "crossings at " << format_double(c.level) << " m: raw " << c.raw << ", smoothed " << c.smoothed
              << "\n";
  return 0;
}

struct ServeArgs {
  std::string scene, listen;
  bool stdio{false};
  int decimation{6};
  std::size_t queue_bound{4096};
};

int cmd_serve(const ServeArgs& a) {
  const Scene scene = load_scene_file(a.scene);
  ServerOptions opts;
  opts.session.ui_decimation = a.decimation;
  opts.queue_bound = a.queue_bound;
  if (a.stdio) {
    std::ios::sync_with_stdio(false);
    serve_stream(scene, opts.session, std::cin, std::cout);
    return 0;
  }
  if (a.listen.empty()) throw std::runtime_error("serve: give --listen host:port or --stdio");
  const auto [host, port] = parse_listen_address(a.listen);

  // Workers inherit the blocked mask, so only sigwait below sees the signals.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  std::signal(SIGPIPE, SIG_IGN);

  SessionServer server(scene, opts);
  const auto bound = server.start(host, port);
  std::cerr << "listening on " << host << ":" << bound << "\n";
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaze-depth interaction engine, simulator and experiment harness"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a synthetic gaze trace from an intent script");
  s->add_option("--scene", sim.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--script", sim.script, "Intent script JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--seed", sim.seed, "RNG seed");
  s->add_option("--out", sim.out, "Output trace (JSONL)")->required();
  s->add_option("--rate", sim.rate, "Sampling rate in Hz")->check(CLI::PositiveNumber);
  s->add_option("--human", sim.human, "Observer parameters JSON")->check(CLI::ExistingFile);
  s->add_option("--labels", sim.labels, "Also write the scripted segment labels (JSON)");

  ReplayArgs rep;
  auto* r = app.add_subcommand("replay", "Stream a trace through the filter and the interaction engine");
  r->add_option("--scene", rep.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  r->add_option("--trace", rep.trace, "Input trace (JSONL)")->required()->check(CLI::ExistingFile);
  r->add_option("--out", rep.out, "Output events (JSONL)")->required();
  r->add_option("--decimation", rep.decimation, "ui_state every N frames, 0 disables")->check(CLI::NonNegativeNumber);
  r->add_option("--filter-window", rep.filter_window, "Moving-average window in seconds")->check(CLI::PositiveNumber);

  AnalyzeArgs ana;
  auto* an = app.add_subcommand("analyze", "Depth statistics of a trace");
  an->add_option("--trace", ana.trace, "Input trace (JSONL)")->required()->check(CLI::ExistingFile);
  an->add_option("--out", ana.out, "Output report (CSV)")->required();
  an->add_option("--script", ana.script, "Script that produced the trace, to group rows by fixation")
      ->check(CLI::ExistingFile);
  an->add_option("--scene", ana.scene, "Scene the script refers to")->check(CLI::ExistingFile);
  an->add_option("--seed", ana.seed, "Seed the trace was generated with");
  an->add_option("--rate", ana.rate, "Sampling rate the trace was generated with")->check(CLI::PositiveNumber);
  an->add_option("--human", ana.human, "Observer parameters JSON")->check(CLI::ExistingFile);
  an->add_option("--ipd", ana.ipd, "Interpupillary distance in meters")->check(CLI::PositiveNumber);
  an->add_option("--max-depth", ana.max_depth, "Depth beyond which estimates count as divergent")
      ->check(CLI::PositiveNumber);

  ExperimentArgs exp;
  auto* e = app.add_subcommand("experiment", "Run an experiment plan");
  e->add_option("--plan", exp.plan, "Plan JSON")->required()->check(CLI::ExistingFile);
  e->add_option("--out", exp.out, "Output directory")->required();
  e->add_option("--threads", exp.threads, "Worker threads, 0 = hardware concurrency");

  PilotArgs pil;
  auto* p = app.add_subcommand("pilot", "Depth-noise characterization at 0.5, 1 and 2 m");
  p->add_option("--scene", pil.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  p->add_option("--out", pil.out, "Output directory")->required();
  p->add_option("--seed", pil.seed, "RNG seed");
  p->add_option("--noise", pil.noise, "Per-eye angular noise in degrees")->check(CLI::NonNegativeNumber);
  p->add_option("--frames", pil.frames, "Frames per target")->check(CLI::PositiveNumber);

  ServeArgs srv;
  auto* sv = app.add_subcommand("serve", "Run the line-delimited JSON session service");
  sv->add_option("--scene", srv.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  auto* listen = sv->add_option("--listen", srv.listen, "host:port to listen on");
  sv->add_flag("--stdio", srv.stdio, "Serve one session over stdin/stdout")->excludes(listen);
  sv->add_option("--decimation", srv.decimation, "ui_state every N frames, 0 disables")
      ->check(CLI::NonNegativeNumber);
  sv->add_option("--queue-bound", srv.queue_bound, "Pending lines per session before it is closed")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) return cmd_simulate(sim);
    if (*r) return cmd_replay(rep);
    if (*an) return cmd_analyze(ana);
    if (*e) return cmd_experiment(exp);
    if (*p) return cmd_pilot(pil);
    if (*sv) return cmd_serve(srv);
  } catch (const std::exception& ex) {
    std::cerr << "gazedepth: " << ex.what() << "\n";
    return 1;
  }
  return 1;
}
