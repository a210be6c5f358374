#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include "gazedepth/geometry.hpp"

namespace gazedepth {

struct SmoothedDepth {
  double timestamp{0};
  std::optional<double> depth;
  std::size_t sample_count{0};

  bool operator==(const SmoothedDepth&) const = default;
};

// Trailing, time-based moving average over valid depth estimates. An entry at
// exactly (now - window) is still inside the window, so at 120 Hz a 0.2 s
// window holds 25 samples. Invalid estimates only advance the clock.
class DepthFilter {
 public:
  explicit DepthFilter(double window_s = 0.2);

  SmoothedDepth push(const DepthEstimate& est);
  void reset();

  double window() const { return window_; }
  std::size_t size() const { return buffer_.size(); }
  bool empty() const { return buffer_.empty(); }
  const std::optional<SmoothedDepth>& last_output() const { return last_output_; }

 private:
  struct Entry {
    double timestamp;
    double depth;
  };

  double window_;
  std::deque<Entry> buffer_;
  std::optional<double> last_timestamp_;
  std::optional<SmoothedDepth> last_output_;
};

}  // namespace gazedepth
