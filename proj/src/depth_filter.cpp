#include "gazedepth/depth_filter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gazedepth {

namespace {
// Absorbs rounding in k/rate timestamps so the window edge is stable.
constexpr double kEdgeSlack = 1e-9;
}  // namespace

DepthFilter::DepthFilter(double window_s) : window_(window_s) {
  if (!(window_s > 0) || !std::isfinite(window_s))
    throw std::invalid_argument("DepthFilter: window must be a positive number of seconds");
}

SmoothedDepth DepthFilter::push(const DepthEstimate& est) {
  if (!std::isfinite(est.timestamp))
    throw std::invalid_argument("DepthFilter::push: non-finite timestamp");
  if (last_timestamp_ && !(est.timestamp > *last_timestamp_))
    throw std::invalid_argument("DepthFilter::push: out-of-order timestamp " +
                                std::to_string(est.timestamp));
  last_timestamp_ = est.timestamp;

  const double horizon = est.timestamp - window_ - kEdgeSlack;
  while (!buffer_.empty() && buffer_.front().timestamp < horizon) buffer_.pop_front();
  if (est.valid() && est.raw_depth) buffer_.push_back({est.timestamp, *est.raw_depth});

  SmoothedDepth out;
  out.timestamp = est.timestamp;
  out.sample_count = buffer_.size();
  if (!buffer_.empty()) {
    double sum = 0;
    double lo = buffer_.front().depth;
    double hi = lo;
    for (const auto& e : buffer_) {
      sum += e.depth;
      lo = std::min(lo, e.depth);
      hi = std::max(hi, e.depth);
    }
    out.depth = std::clamp(sum / static_cast<double>(buffer_.size()), lo, hi);
  }
  last_output_ = out;
  return out;
}

void DepthFilter::reset() {
  buffer_.clear();
  last_timestamp_.reset();
  last_output_.reset();
}

}  // namespace gazedepth
