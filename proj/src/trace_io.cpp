#include "gazedepth/trace_io.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gazedepth/format.hpp"

namespace gazedepth {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void append_vec(std::string& out, const Eigen::Vector3d& v) {
  out += '[';
  out += format_double(v.x());
  out += ',';
  out += format_double(v.y());
  out += ',';
  out += format_double(v.z());
  out += ']';
}

Eigen::Vector3d read_vec(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw TraceFormatError(std::string(key) + ": missing required field");
  if (!it->is_array() || it->size() != 3) throw TraceFormatError(std::string(key) + ": expected [x, y, z]");
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!(*it)[i].is_number()) throw TraceFormatError(std::string(key) + ": expected numbers");
    v[i] = (*it)[i].get<double>();
  }
  if (!v.allFinite()) throw TraceFormatError(std::string(key) + ": must be finite");
  return v;
}

bool read_bool(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw TraceFormatError(std::string(key) + ": missing required field");
  if (!it->is_boolean()) throw TraceFormatError(std::string(key) + ": expected true or false");
  return it->get<bool>();
}

// nlohmann emits integral doubles as "1.0"; keep the wire format consistent
// with trace lines by writing numbers through format_double.
ordered_json number(double v) { return ordered_json::parse(format_double(v)); }

}  // namespace

std::string format_trace_line(const GazeSample& s) {
  std::string out;
  out.reserve(160);
  out += "{\"t\":";
  out += format_double(s.timestamp);
  out += ",\"lo\":";
  append_vec(out, s.left_origin);
  out += ",\"ld\":";
  append_vec(out, s.left_dir);
  out += ",\"ro\":";
  append_vec(out, s.right_origin);
  out += ",\"rd\":";
  append_vec(out, s.right_dir);
  out += ",\"lv\":";
  out += s.left_valid ? "true" : "false";
  out += ",\"rv\":";
  out += s.right_valid ? "true" : "false";
  out += '}';
  return out;
}

GazeSample parse_trace_line(std::string_view line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw TraceFormatError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw TraceFormatError("trace line must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "t" && key != "lo" && key != "ld" && key != "ro" && key != "rd" && key != "lv" && key != "rv")
      throw TraceFormatError(key + ": unknown key");
  }
  GazeSample s;
  auto t = doc.find("t");
  if (t == doc.end()) throw TraceFormatError("t: missing required field");
  if (!t->is_number()) throw TraceFormatError("t: expected a number");
  s.timestamp = t->get<double>();
  if (!std::isfinite(s.timestamp)) throw TraceFormatError("t: must be finite");
  s.left_origin = read_vec(doc, "lo");
  s.left_dir = read_vec(doc, "ld");
  s.right_origin = read_vec(doc, "ro");
  s.right_dir = read_vec(doc, "rd");
  s.left_valid = read_bool(doc, "lv");
  s.right_valid = read_bool(doc, "rv");
  constexpr double kUnitTol = 1e-6;
  if (s.left_valid && std::abs(s.left_dir.norm() - 1) > kUnitTol) throw TraceFormatError("ld: must be a unit vector");
  if (s.right_valid && std::abs(s.right_dir.norm() - 1) > kUnitTol) throw TraceFormatError("rd: must be a unit vector");
  return s;
}

void write_trace(std::ostream& out, const std::vector<GazeSample>& samples) {
  for (const auto& s : samples) out << format_trace_line(s) << '\n';
}

std::vector<GazeSample> read_trace(std::istream& in) {
  std::vector<GazeSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      GazeSample s = parse_trace_line(line);
      if (!out.empty() && !(s.timestamp > out.back().timestamp))
        throw TraceFormatError("t: timestamps must be strictly increasing");
      out.push_back(s);
    } catch (const TraceFormatError& e) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<GazeSample> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceFormatError("cannot read trace file '" + path + "'");
  return read_trace(in);
}

std::string format_event_line(const InteractionEvent& e) {
  ordered_json j;
  j["t"] = number(e.timestamp);
  j["event"] = to_string(e.kind);
  ordered_json payload;
  payload["object"] = e.object_id;
  if (!e.window_id.empty()) payload["window"] = e.window_id;
  j["payload"] = payload;
  return j.dump();
}

std::string format_ui_state_line(const UiState& ui) {
  ordered_json j;
  j["t"] = number(ui.timestamp);
  j["event"] = "ui_state";
  ordered_json p;
  p["mode"] = to_string(ui.mode);
  p["smoothed_depth"] = ui.smoothed.depth ? number(*ui.smoothed.depth) : ordered_json(nullptr);
  p["sample_count"] = ui.smoothed.sample_count;
  p["active_window"] = ui.active_window ? ordered_json(*ui.active_window) : ordered_json(nullptr);
  if (ui.magnification) p["magnification"] = number(*ui.magnification);
  p["cue_mode"] = to_string(ui.cue_mode);
  p["cue_placement"] = ui.cue_placement;
  p["cue_opacity"] = number(ui.cue_opacity);
  ordered_json layers = ordered_json::array();
  for (const auto& l : ui.layers) layers.push_back({{"id", l.id}, {"opacity", number(l.opacity)}});
  p["layers"] = layers;
  j["payload"] = p;
  return j.dump();
}

std::string format_error_line(double t, std::string_view message) {
  ordered_json j;
  j["t"] = number(t);
  j["event"] = "error";
  j["payload"] = {{"message", std::string(message)}};
  return j.dump();
}

}  // namespace gazedepth
