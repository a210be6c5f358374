#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include <Eigen/Core>

namespace gazedepth {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

// Head-local frame: x to the user's right, y up, z forward into the scene.
template <typename Scalar>
struct GazeSampleT {
  Scalar timestamp{0};
  Vec3<Scalar> left_origin{Vec3<Scalar>::Zero()};
  Vec3<Scalar> left_dir{Vec3<Scalar>::UnitZ()};
  Vec3<Scalar> right_origin{Vec3<Scalar>::Zero()};
  Vec3<Scalar> right_dir{Vec3<Scalar>::UnitZ()};
  bool left_valid{false};
  bool right_valid{false};

  bool operator==(const GazeSampleT&) const = default;
};

using GazeSample = GazeSampleT<double>;

template <typename Scalar>
struct EyeGeometryT {
  Scalar ipd{Scalar(0.064)};
  Scalar max_depth{Scalar(20)};

  void validate() const {
    if (!(ipd > 0)) throw std::invalid_argument("EyeGeometry: ipd must be > 0");
    if (!(max_depth > 0)) throw std::invalid_argument("EyeGeometry: max_depth must be > 0");
  }

  Vec3<Scalar> left_origin() const { return Vec3<Scalar>(-ipd / 2, 0, 0); }
  Vec3<Scalar> right_origin() const { return Vec3<Scalar>(ipd / 2, 0, 0); }
};

using EyeGeometry = EyeGeometryT<double>;

enum class DepthStatus { valid, divergent, behind, invalid_sample };

const char* to_string(DepthStatus status);

template <typename Scalar>
struct DepthEstimateT {
  Scalar timestamp{0};
  std::optional<Scalar> raw_depth;
  DepthStatus status{DepthStatus::invalid_sample};

  bool valid() const { return status == DepthStatus::valid; }
};

using DepthEstimate = DepthEstimateT<double>;

namespace detail {

template <typename Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

template <typename Scalar>
Vec2<Scalar> to_xz(const Vec3<Scalar>& v) {
  return Vec2<Scalar>(v.x(), v.z());
}

}  // namespace detail

/// Visual depth of a binocular sample.
///
/// Both gaze rays are projected onto the x-z plane and intersected there; the
/// depth is the planar distance from the eye midpoint to that intersection.
/// The function is total: every failure mode is reported through `status`.
///  - invalid_sample: an eye is flagged invalid, or a ray is (nearly) vertical
///  - divergent: the rays are parallel, meet only at negative ray parameters,
///    or meet farther than `max_depth`
///  - behind: the rays meet at non-negative parameters behind the eye line
template <typename Scalar>
DepthEstimateT<Scalar> estimate_depth(const GazeSampleT<Scalar>& sample,
                                      const EyeGeometryT<Scalar>& geom) {
  using detail::cross2;
  using detail::to_xz;
  constexpr Scalar kMinProjectedNorm = Scalar(1e-9);
  constexpr Scalar kParallel = Scalar(1e-15);

  DepthEstimateT<Scalar> out;
  out.timestamp = sample.timestamp;
  if (!sample.left_valid || !sample.right_valid) return out;

  const Vec2<Scalar> ol = to_xz(sample.left_origin);
  const Vec2<Scalar> or_ = to_xz(sample.right_origin);
  Vec2<Scalar> dl = to_xz(sample.left_dir);
  Vec2<Scalar> dr = to_xz(sample.right_dir);
  const Scalar nl = dl.norm();
  const Scalar nr = dr.norm();
  if (!(nl >= kMinProjectedNorm) || !(nr >= kMinProjectedNorm)) return out;
  dl /= nl;
  dr /= nr;

  const Scalar denom = cross2(dl, dr);
  if (!(std::abs(denom) > kParallel)) {
    out.status = DepthStatus::divergent;
    return out;
  }
  const Vec2<Scalar> baseline = or_ - ol;
  const Scalar s = cross2(baseline, dr) / denom;
  const Scalar t = cross2(baseline, dl) / denom;
  if (s < 0 || t < 0) {
    out.status = DepthStatus::divergent;
    return out;
  }

  const Vec2<Scalar> hit = ol + s * dl;
  const Vec2<Scalar> mid = (ol + or_) / Scalar(2);
  // Forward normal of the eye line; degenerate baselines fall back to +z.
  Vec2<Scalar> forward(-baseline.y(), baseline.x());
  const Scalar bn = forward.norm();
  forward = bn > 0 ? Vec2<Scalar>(forward / bn) : Vec2<Scalar>(0, 1);
  // Forward is the side of the eye line facing +z, whichever eye is listed first.
  if (forward.y() < 0 || (forward.y() == 0 && forward.x() < 0)) forward = -forward;
  if ((hit - mid).dot(forward) < 0) {
    out.status = DepthStatus::behind;
    return out;
  }

  const Scalar depth = (hit - mid).norm();
  if (!(depth > 0) || depth > geom.max_depth) {
    out.status = DepthStatus::divergent;
    return out;
  }
  out.raw_depth = depth;
  out.status = DepthStatus::valid;
  return out;
}

/// Half-vergence angle for a straight-ahead fixation at `depth`.
template <typename Scalar>
Scalar vergence_angle_for_depth(Scalar depth, const EyeGeometryT<Scalar>& geom) {
  if (!(depth > 0)) throw std::invalid_argument("vergence_angle_for_depth: depth must be > 0");
  return std::atan2(geom.ipd / 2, depth);
}

/// Inverse of vergence_angle_for_depth, defined for angles in (0, pi/2].
template <typename Scalar>
Scalar depth_for_vergence_angle(Scalar half_angle, const EyeGeometryT<Scalar>& geom) {
  if (!(half_angle > 0)) throw std::invalid_argument("depth_for_vergence_angle: angle must be > 0");
  return (geom.ipd / 2) / std::tan(half_angle);
}

/// |d depth / d theta| at the vergence angle of `depth`. Grows as depth^2.
template <typename Scalar>
Scalar depth_sensitivity(Scalar depth, const EyeGeometryT<Scalar>& geom) {
  const Scalar theta = vergence_angle_for_depth(depth, geom);
  const Scalar s = std::sin(theta);
  return (geom.ipd / 2) / (s * s);
}

template <typename Scalar>
struct RayT {
  Vec3<Scalar> origin;
  Vec3<Scalar> dir;
};

using Ray = RayT<double>;

/// Single pointing ray from the eye midpoint along the averaged direction.
/// Falls back to the valid eye when only one is tracked.
template <typename Scalar>
std::optional<RayT<Scalar>> cyclopean_ray(const GazeSampleT<Scalar>& sample) {
  if (sample.left_valid && sample.right_valid) {
    Vec3<Scalar> dir = sample.left_dir.normalized() + sample.right_dir.normalized();
    const Scalar n = dir.norm();
    if (!(n > Scalar(1e-12))) return std::nullopt;
    return RayT<Scalar>{(sample.left_origin + sample.right_origin) / Scalar(2), dir / n};
  }
  if (sample.left_valid && sample.left_dir.norm() > 0)
    return RayT<Scalar>{sample.left_origin, sample.left_dir.normalized()};
  if (sample.right_valid && sample.right_dir.norm() > 0)
    return RayT<Scalar>{sample.right_origin, sample.right_dir.normalized()};
  return std::nullopt;
}

}  // namespace gazedepth
