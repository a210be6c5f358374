#pragma once

// Shared fixtures and independent reference computations for the tests.
// Nothing here calls into the code under test except to build inputs.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gazedepth/geometry.hpp"
#include "gazedepth/scene.hpp"

namespace testing {

inline std::string data_path(const std::string& rel) { return std::string(GAZEDEPTH_DATA_DIR) + "/" + rel; }
inline std::string fixture_path(const std::string& rel) { return std::string(GAZEDEPTH_FIXTURE_DIR) + "/" + rel; }

// Noiseless sample with both eyes aimed at `p`.
inline gazedepth::GazeSample aim_at(const Eigen::Vector3d& p, double t = 0, double ipd = 0.064) {
  gazedepth::GazeSample s;
  s.timestamp = t;
  s.left_origin = {-ipd / 2, 0, 0};
  s.right_origin = {ipd / 2, 0, 0};
  s.left_dir = (p - s.left_origin).normalized();
  s.right_dir = (p - s.right_origin).normalized();
  s.left_valid = s.right_valid = true;
  return s;
}

// Brute-force 2-D line intersection by Cramer's rule on the parametric form
// o1 + a*d1 = o2 + b*d2, in the x-z plane. Returns the intersection point.
inline std::optional<Eigen::Vector2d> intersect_xz(const Eigen::Vector3d& o1, const Eigen::Vector3d& d1,
                                                   const Eigen::Vector3d& o2, const Eigen::Vector3d& d2) {
  const double a11 = d1.x(), a12 = -d2.x(), a21 = d1.z(), a22 = -d2.z();
  const double b1 = o2.x() - o1.x(), b2 = o2.z() - o1.z();
  const double det = a11 * a22 - a12 * a21;
  if (std::abs(det) < 1e-300) return std::nullopt;
  const double a = (b1 * a22 - a12 * b2) / det;
  return Eigen::Vector2d(o1.x() + a * d1.x(), o1.z() + a * d1.z());
}

// Half-vergence angle and its inverse, written out independently.
inline double half_angle(double depth, double ipd = 0.064) { return std::atan((ipd / 2) / depth); }
inline double depth_of_angle(double theta, double ipd = 0.064) { return (ipd / 2) / std::tan(theta); }

// Angle-domain smoothstep between two depths.
inline double vergence_oracle(double d0, double d1, double duration, double t, double ipd = 0.064) {
  if (t <= 0) return d0;
  if (t >= duration) return d1;
  const double u = t / duration;
  const double s = 3 * u * u - 2 * u * u * u;
  return depth_of_angle(half_angle(d0, ipd) + s * (half_angle(d1, ipd) - half_angle(d0, ipd)), ipd);
}

// Mean of the values whose time lies in [t - window, t].
inline std::optional<double> windowed_mean(const std::vector<double>& ts, const std::vector<std::optional<double>>& xs,
                                           double t, double window) {
  double sum = 0;
  int n = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] > t + 1e-12 || ts[i] < t - window - 1e-9 || !xs[i]) continue;
    sum += *xs[i];
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

inline gazedepth::Scene gallery_scene() {
  gazedepth::Scene s;
  s.objects = {{"painting", {0, 0, 8}, 0.6}, {"sculpture", {-2.5, 0, 8}, 0.6}, {"tapestry", {2.5, 0, 8}, 0.6}};
  gazedepth::VirtualWindow w;
  w.id = "info";
  w.depth = 1.0;
  w.zone_near = 0.25;
  w.zone_far = 1.75;
  s.windows = {w};
  s.layers = {{"window", 1.0, 0.5, 0.85}, {"gallery", 8.0, 0.5, 0.85}};
  s.cue.mode = gazedepth::CueMode::adaptive;
  s.validate();
  return s;
}

}  // namespace testing
