#include "gazedepth/geometry.hpp"

namespace gazedepth {

const char* to_string(DepthStatus status) {
  switch (status) {
    case DepthStatus::valid: return "valid";
    case DepthStatus::divergent: return "divergent";
    case DepthStatus::behind: return "behind";
    case DepthStatus::invalid_sample: return "invalid_sample";
  }
  return "unknown";
}

}  // namespace gazedepth
