#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gazedepth/engine.hpp"
#include "gazedepth/geometry.hpp"

namespace gazedepth {

class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One gaze sample per line, keys in this order:
//   {"t":0.5,"lo":[x,y,z],"ld":[x,y,z],"ro":[x,y,z],"rd":[x,y,z],"lv":true,"rv":true}
// Numbers use the shortest round-trip representation.
std::string format_trace_line(const GazeSample& sample);
GazeSample parse_trace_line(std::string_view line);

void write_trace(std::ostream& out, const std::vector<GazeSample>& samples);
// Enforces strictly increasing timestamps; errors carry the 1-based line number.
std::vector<GazeSample> read_trace(std::istream& in);
std::vector<GazeSample> read_trace_file(const std::string& path);

// {"t":..,"event":"window_activated","payload":{"object":"..","window":".."}}
std::string format_event_line(const InteractionEvent& event);
// {"t":..,"event":"ui_state","payload":{"mode":..,"smoothed_depth":..,...}}
std::string format_ui_state_line(const UiState& ui);
std::string format_error_line(double t, std::string_view message);

}  // namespace gazedepth
